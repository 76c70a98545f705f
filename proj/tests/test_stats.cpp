#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "relnet/stats.hpp"
#include "support/reference_oracles.hpp"

using namespace relnet;

TEST_CASE("perfect linear relation gives both coefficients 1 and p 0") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y{3, 5, 7, 9, 11}; // y = 2x + 1
    auto p = pearson(x, y);
    CHECK(p.coefficient == 1.0);
    CHECK(p.p_value == 0.0);
    auto s = spearman(x, y);
    CHECK(s.coefficient == 1.0);
    CHECK(s.p_value == 0.0);
}

TEST_CASE("monotone nonlinear relation separates the two coefficients") {
    std::vector<double> x{0, 1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(std::exp(v));
    CHECK(spearman(x, y).coefficient == 1.0);
    CHECK(pearson(x, y).coefficient < 1.0);
}

TEST_CASE("hand-computed pearson fixture (r = 0.8, p = 0.2)") {
    // n = 4, df = 2: the t CDF has the closed form (1 + t/sqrt(2+t^2))/2,
    // which makes p exactly 0.2 for this pair.
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{1, 2, 4, 3};
    auto p = pearson(x, y);
    CHECK(p.coefficient == Approx(0.8).margin(1e-12));
    CHECK(p.p_value == Approx(0.2).margin(1e-10));
}

TEST_CASE("hand-computed spearman fixture (rho = 0.5, p = 2/3)") {
    // n = 3, df = 1: the t CDF is 1/2 + atan(t)/pi; rank correlation 0.5
    // gives t = 1/sqrt(3) and p exactly 2/3.
    std::vector<double> x{1, 2, 3};
    std::vector<double> y{1, 3, 2};
    auto s = spearman(x, y);
    CHECK(s.coefficient == Approx(0.5).margin(1e-12));
    CHECK(s.p_value == Approx(2.0 / 3.0).margin(1e-10));
}

TEST_CASE("average ranks resolve ties") {
    std::vector<double> v{10, 20, 20, 30};
    auto r = average_ranks(v);
    CHECK(r == std::vector<double>{1.0, 2.5, 2.5, 4.0});
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(30), y(30);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = u(rng);
        auto base = spearman(x, y);

        auto my = y;
        const double shift = u(rng);
        for (auto& v : my) v = std::exp(0.3 * v) + std::pow(v + 10.0, 3) * 1e-3 + shift;
        auto mapped = spearman(x, my);
        CHECK(mapped.coefficient == Approx(base.coefficient).margin(1e-12));
        CHECK(mapped.p_value == Approx(base.p_value).margin(1e-12));
    }
}

TEST_CASE("constant input is an undefined-correlation error") {
    std::vector<double> c{1, 1, 1, 1};
    std::vector<double> y{1, 2, 3, 4};
    CHECK_THROWS_AS(pearson(c, y), std::invalid_argument);
    CHECK_THROWS_AS(pearson(y, c), std::invalid_argument);
    CHECK_THROWS_AS(spearman(c, y), std::invalid_argument);
    std::vector<double> two{1, 2};
    CHECK_THROWS_AS(pearson(two, two), std::invalid_argument); // length < 3
    std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(pearson(three, two), std::invalid_argument); // length mismatch
}

TEST_CASE("t p-values match closed forms for one and two degrees of freedom") {
    for (double t : {0.1, 0.5, 1.0, 2.5, 7.0}) {
        const double p1 = 2.0 * (0.5 - std::atan(t) / M_PI);
        CHECK(t_two_sided_p(t, 1.0) == Approx(p1).margin(1e-12));
        const double p2 = 2.0 * (0.5 * (1.0 - t / std::sqrt(2.0 + t * t)));
        CHECK(t_two_sided_p(t, 2.0) == Approx(p2).margin(1e-12));
    }
}

TEST_CASE("t p-values match the quadrature oracle across a grid") {
    for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 83.0}) {
        for (double t : {0.2, 0.8, 1.5, 2.3, 3.1, 4.8}) {
            const double expected = testref::t_two_sided_p_quadrature(t, df);
            CHECK(t_two_sided_p(t, df) == Approx(expected).margin(1e-10));
        }
    }
}

TEST_CASE("paired t-test endpoints") {
    std::vector<double> a{1, 2, 3};
    CHECK(paired_ttest(a, a) == 1.0); // identical vectors

    std::vector<double> b{4, 5, 6}; // constant difference, zero variance
    CHECK(paired_ttest(a, b) == 0.0);
    CHECK(paired_ttest(a, b) < 0.01);

    std::vector<double> short_b{4, 5};
    CHECK_THROWS_AS(paired_ttest(a, short_b), std::invalid_argument);

    // differences [1, -1]: zero mean with variance -> t = 0 -> p = 1
    std::vector<double> c{2, 1}, d{1, 2};
    CHECK(paired_ttest(c, d) == 1.0);
}

TEST_CASE("paired t-test matches the closed form for three pairs") {
    // d = [1, 2, 3]: t = 2 / (1/sqrt(3)) = sqrt(12), df = 2
    std::vector<double> a{5, 6, 7}, b{4, 4, 4};
    const double t = std::sqrt(12.0);
    const double expected = 1.0 - t / std::sqrt(2.0 + t * t);
    CHECK(paired_ttest(a, b) == Approx(expected).margin(1e-12));
}

TEST_CASE("permutation p-value agrees with the t approximation in magnitude") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.4);
    std::vector<double> x(40), y(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i);
        y[i] = static_cast<double>(i) + noise(rng) * 40.0;
    }
    auto s = spearman(x, y);
    const double perm = spearman_permutation_p(x, y, 11, 2000);
    // both should call the association significant
    CHECK(s.p_value < 0.05);
    CHECK(perm < 0.05);
    // deterministic for a fixed seed
    CHECK(perm == spearman_permutation_p(x, y, 11, 2000));
}
