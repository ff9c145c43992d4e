#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace gm {

/// Deterministic random source used wherever a seed appears in a public
/// signature. Wraps std::mt19937_64 but derives doubles and bounded ints
/// itself, so streams are reproducible for a given seed regardless of the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1); never returns 0, safe as a log argument.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Unbiased via rejection.
    int uniform_int(int n) {
        if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
        const auto un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = (UINT64_MAX / un) * un;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    /// Samples an index from a probability row by linear CDF scan.
    /// Rounding residue at the top of the CDF falls to the last index.
    int categorical(std::span<const double> probs) {
        if (probs.empty()) throw std::invalid_argument("categorical: empty row");
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size() - 1);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gm
