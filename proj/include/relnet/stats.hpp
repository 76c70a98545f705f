#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace relnet {

namespace detail {

/// Fisher-Yates with a rejection-sampled bounded draw. Unlike
/// std::shuffle, every step is pinned by the mt19937_64 stream, so a seed
/// reproduces the same permutation on every platform.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max()
            - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw;
        do {
            draw = rng();
        } while (draw >= limit);
        std::swap(v[i - 1], v[draw % bound]);
    }
}

/// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
inline double ibeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double ibeta_reg(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                            + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a)
                          + b * std::log1p(-x) + a * std::log(x))
                     * ibeta_cf(b, a, 1.0 - x) / b;
}

} // namespace detail

/// Two-sided p-value of a Student-t statistic with df degrees of freedom:
/// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return detail::ibeta_reg(0.5 * df, 0.5, df / (df + t * t));
}

struct Correlation {
    double coefficient;
    double p_value;
};

/// Pearson correlation with the two-sided p-value from
/// t = r * sqrt((n-2) / (1-r^2)), df = n-2. Requires length >= 3 and
/// non-constant inputs.
inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (n < 3) throw std::invalid_argument("pearson: need at least 3 samples");

    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: correlation undefined for constant input");

    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    if (1.0 - r * r <= 0.0) return {r, 0.0};
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return {r, t_two_sided_p(t, df)};
}

/// Ranks with ties assigned the average of the positions they occupy.
inline std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation: Pearson on average-tie ranks, p-value via the
/// same t-approximation.
inline Correlation spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

/// Permutation-test p-value for Spearman (two-sided): the fraction of
/// seeded permutations of y whose |coefficient| reaches the observed one.
inline double spearman_permutation_p(std::span<const double> x, std::span<const double> y,
                                     std::uint64_t seed, int permutations = 10'000) {
    if (permutations < 1) throw std::invalid_argument("need at least 1 permutation");
    const double observed = std::abs(spearman(x, y).coefficient);
    std::vector<double> shuffled(y.begin(), y.end());
    std::mt19937_64 rng(seed);
    int hits = 0;
    for (int p = 0; p < permutations; ++p) {
        detail::seeded_shuffle(shuffled, rng);
        if (std::abs(spearman(x, shuffled).coefficient) >= observed - 1e-12) ++hits;
    }
    return static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
}

/// Two-sided paired t-test. Zero-variance differences are guarded: p = 1
/// when the mean difference is also zero, p = 0 otherwise.
inline double paired_ttest(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size()) throw std::invalid_argument("paired_ttest: length mismatch");
    if (n < 2) throw std::invalid_argument("paired_ttest: need at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
    const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
    return t_two_sided_p(t, static_cast<double>(n - 1));
}

} // namespace relnet
