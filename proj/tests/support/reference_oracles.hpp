#pragma once

// Independent reference computations used only to check the library. These
// deliberately avoid the library's own code paths: dense matrices instead
// of CSR sweeps, quadrature instead of the incomplete-beta expansion.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relnet/graph.hpp"

namespace testref {

/// Dense damped PageRank by plain power iteration on an explicit matrix,
/// dangling mass spread uniformly.
inline std::vector<double> dense_pagerank(const relnet::SourceGraph& g, double damping,
                                          int iterations = 200) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    std::vector<bool> dangling(n, true);
    for (std::size_t s = 0; s < n; ++s) {
        for (auto e : g.out_edges(static_cast<relnet::NodeId>(s))) {
            w[s][e.dst] = e.weight;
            dangling[s] = false;
        }
    }
    std::vector<double> pr(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
    for (int it = 0; it < iterations; ++it) {
        double dmass = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            if (dangling[s]) dmass += pr[s];
        for (std::size_t d = 0; d < n; ++d) {
            double acc = 0.0;
            for (std::size_t s = 0; s < n; ++s) acc += pr[s] * w[s][d];
            next[d] = (1.0 - damping) / static_cast<double>(n)
                      + damping * (acc + dmass / static_cast<double>(n));
        }
        pr.swap(next);
    }
    double sum = 0.0;
    for (double v : pr) sum += v;
    for (auto& v : pr) v /= sum;
    return pr;
}

/// Student-t density.
inline double t_pdf(double u, double df) {
    const double c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df)
                     - 0.5 * std::log(df * M_PI);
    return std::exp(c - 0.5 * (df + 1.0) * std::log1p(u * u / df));
}

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(double a, double b, double fa, double fm, double fb, double whole,
                       double df, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = t_pdf(lm, df), frm = t_pdf(rm, df);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a, m, fa, flm, fm, left, df, 0.5 * eps, depth - 1)
           + adaptive(m, b, fm, frm, fb, right, df, 0.5 * eps, depth - 1);
}

} // namespace detail

/// Two-sided t-distribution p-value by adaptive Simpson quadrature of the
/// density over [-|t|, |t|]: p = 1 - integral.
inline double t_two_sided_p_quadrature(double t, double df) {
    const double a = -std::abs(t), b = std::abs(t);
    if (a == b) return 1.0;
    const double fa = t_pdf(a, df), fb = t_pdf(b, df), fm = t_pdf(0.0, df);
    const double whole = detail::simpson(a, b, fa, fm, fb);
    const double integral = detail::adaptive(a, b, fa, fm, fb, whole, df, 1e-13, 40);
    return 1.0 - integral;
}

} // namespace testref
