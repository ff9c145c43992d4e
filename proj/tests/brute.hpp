// Test-only reference computations, kept independent of the library's solver
// paths: occupancies by truncated power series, binomials by Pascal's
// triangle, kernels by direct summation.
#pragma once

#include <cmath>
#include <vector>

#include "gammamodel/matrix.hpp"
#include "gammamodel/mdp.hpp"

namespace brute {

inline double tv(std::span<const double> a, std::span<const double> b) {
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return 0.5 * l1;
}

inline std::vector<double> matvec_left(std::span<const double> row, const gm::Matrix& m) {
    std::vector<double> out(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        if (row[i] == 0.0) continue;
        for (int j = 0; j < m.cols; ++j) out[j] += row[i] * m(i, j);
    }
    return out;
}

// occupancy row by truncated geometric series over the chain's step kernels
inline std::vector<double> occupancy_row(const gm::TabularMdp& mdp, const gm::PolicyTable& policy,
                                         double gamma, int s, int a, int t_max) {
    const gm::Matrix kernel = gm::policy_transition_matrix(mdp, policy);
    std::vector<double> dist(mdp.transition_row(s, a).begin(), mdp.transition_row(s, a).end());
    std::vector<double> out(mdp.n_states, 0.0);
    double weight = 1.0 - gamma;
    for (int t = 1; t <= t_max; ++t) {
        for (int j = 0; j < mdp.n_states; ++j) out[j] += weight * dist[j];
        dist = matvec_left(dist, kernel);
        weight *= gamma;
    }
    return out;
}

// n-step policy kernel row by repeated multiplication
inline std::vector<double> kernel_power_row(const gm::Matrix& kernel, int s, int n) {
    std::vector<double> dist(kernel.cols, 0.0);
    dist[s] = 1.0;
    for (int k = 0; k < n; ++k) dist = matvec_left(dist, kernel);
    return dist;
}

// C(n, k) via Pascal's triangle, exact in doubles for n <= 56
inline double choose(long n, long k) {
    if (k < 0 || k > n) return 0.0;
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    row[0] = 1.0;
    for (long i = 1; i <= n; ++i)
        for (long j = i; j >= 1; --j) row[j] += row[j - 1];
    return row[k];
}

inline double nb_pmf(int n, double gamma, long t) {
    if (t < n) return 0.0;
    if (gamma == 0.0) return t == n ? 1.0 : 0.0;
    return choose(t - 1, t - n) * std::pow(gamma, static_cast<double>(t - n)) *
           std::pow(1.0 - gamma, static_cast<double>(n));
}

}  // namespace brute
