#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "relnet/graph.hpp"

namespace relnet {

enum class OracleMode {
    Forward, // solve (I - gamma P) V = P r
    Reverse  // solve (I - gamma P^T) R = r
};

/// Testing oracle: the exact fixed points of the forward and reversed
/// recurrences obtained by dense Gaussian elimination instead of iteration.
/// Intended for cross-checking the iterative estimators on small graphs;
/// refuses anything larger than 2000 nodes.
inline std::vector<double> linear_solve_oracle(const SourceGraph& g,
                                               const std::vector<double>& rewards, double gamma,
                                               OracleMode mode) {
    const std::size_t n = g.node_count();
    if (n > 2000) throw std::invalid_argument("dense oracle limited to 2000 nodes");
    if (rewards.size() != n) throw std::invalid_argument("reward vector size != node count");
    if (!(gamma >= 0.0) || gamma >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
    if (n == 0) return {};

    // A = I - gamma * M where M = P (forward) or P^T (reverse);
    // b = P r (forward) or r (reverse).
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        a[s][s] = 1.0;
        for (auto e : g.out_edges(static_cast<NodeId>(s))) {
            if (mode == OracleMode::Forward) {
                a[s][e.dst] -= gamma * e.weight;
            } else {
                a[e.dst][s] -= gamma * e.weight;
            }
        }
        if (mode == OracleMode::Forward) {
            for (auto e : g.out_edges(static_cast<NodeId>(s))) b[s] += e.weight * rewards[e.dst];
        } else {
            b[s] = rewards[s];
        }
    }

    // Gaussian elimination with partial pivoting. The system is strictly
    // diagonally dominant for gamma < 1, so a vanishing pivot cannot occur
    // on valid input.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

} // namespace relnet
