#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gm {

/// Dense row-major matrix of doubles. Kept minimal on purpose: the heavy
/// linear algebra is an implementation detail of the oracle module, and
/// everything else only needs row access.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int r, int c) {
        return data[static_cast<std::size_t>(r) * cols + c];
    }
    double operator()(int r, int c) const {
        return data[static_cast<std::size_t>(r) * cols + c];
    }

    std::span<double> row(int r) {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
};

}  // namespace gm
