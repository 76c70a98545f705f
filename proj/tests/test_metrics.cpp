#include <catch2/catch.hpp>

#include <map>

#include "relnet/metrics.hpp"

using namespace relnet;

namespace {

using Labels = std::map<SourceId, ReliabilityLabel>;

SourceId id(const std::string& s) { return SourceId::canonical(s); }

Labels majority_split(std::size_t reliable, std::size_t unreliable, ReliabilityLabel predicted,
                      bool as_gold) {
    Labels out;
    for (std::size_t i = 0; i < reliable; ++i)
        out.emplace(id("rel" + std::to_string(i) + ".test"),
                    as_gold ? ReliabilityLabel::Reliable : predicted);
    for (std::size_t i = 0; i < unreliable; ++i)
        out.emplace(id("unrel" + std::to_string(i) + ".test"),
                    as_gold ? ReliabilityLabel::Unreliable : predicted);
    return out;
}

} // namespace

TEST_CASE("all-correct predictions score 100 everywhere") {
    Labels gold{{id("a.test"), ReliabilityLabel::Reliable},
                {id("b.test"), ReliabilityLabel::Unreliable},
                {id("c.test"), ReliabilityLabel::Reliable}};
    auto m = metrics(gold, gold);
    CHECK(m.accuracy == 100.0);
    CHECK(m.macro.f1 == 100.0);
    CHECK(m.reliable.precision == 100.0);
    CHECK(m.unreliable.recall == 100.0);
}

TEST_CASE("majority-class predictor on the 294/106 split") {
    auto gold = majority_split(294, 106, ReliabilityLabel::Reliable, true);
    auto pred = majority_split(294, 106, ReliabilityLabel::Reliable, false);
    auto m = metrics(pred, gold);

    // Exact confusion arithmetic: precision = 294/400, recall = 1, so
    // reliable F1 = 100 * 588/694 and the macro average is half of it.
    CHECK(m.accuracy == Approx(73.5).margin(1e-9));
    CHECK(m.reliable.f1 == Approx(100.0 * 588.0 / 694.0).margin(1e-9));
    CHECK(m.unreliable.f1 == 0.0);
    CHECK(m.macro.f1 == Approx(100.0 * 294.0 / 694.0).margin(1e-9));
    CHECK(m.unreliable.precision == 0.0);
    CHECK(m.reliable.recall == 100.0);
}

TEST_CASE("an inverted predictor has zero accuracy") {
    Labels gold{{id("a.test"), ReliabilityLabel::Reliable},
                {id("b.test"), ReliabilityLabel::Unreliable}};
    Labels pred{{id("a.test"), ReliabilityLabel::Unreliable},
                {id("b.test"), ReliabilityLabel::Reliable}};
    auto m = metrics(pred, gold);
    CHECK(m.accuracy == 0.0);
    CHECK(m.macro.f1 == 0.0);
}

TEST_CASE("hand confusion fixture with one error per class") {
    Labels gold{{id("a.test"), ReliabilityLabel::Reliable},
                {id("b.test"), ReliabilityLabel::Reliable},
                {id("c.test"), ReliabilityLabel::Unreliable},
                {id("d.test"), ReliabilityLabel::Unreliable}};
    Labels pred{{id("a.test"), ReliabilityLabel::Reliable},
                {id("b.test"), ReliabilityLabel::Unreliable},
                {id("c.test"), ReliabilityLabel::Unreliable},
                {id("d.test"), ReliabilityLabel::Reliable}};
    auto m = metrics(pred, gold);
    CHECK(m.accuracy == 50.0);
    CHECK(m.reliable.precision == 50.0);
    CHECK(m.reliable.recall == 50.0);
    CHECK(m.unreliable.f1 == 50.0);
    CHECK(m.macro.f1 == 50.0);
}

TEST_CASE("accuracy equals micro-average recall") {
    auto gold = majority_split(37, 13, ReliabilityLabel::Reliable, true);
    Labels pred = gold;
    // flip a few predictions
    pred.at(id("rel0.test")) = ReliabilityLabel::Unreliable;
    pred.at(id("rel7.test")) = ReliabilityLabel::Unreliable;
    pred.at(id("unrel3.test")) = ReliabilityLabel::Reliable;
    auto m = metrics(pred, gold);

    const double micro_recall = 100.0 * (35.0 + 12.0) / 50.0;
    CHECK(m.accuracy == Approx(micro_recall).margin(1e-12));
    CHECK(m.macro.f1 >= std::min(m.reliable.f1, m.unreliable.f1));
    CHECK(m.macro.f1 <= std::max(m.reliable.f1, m.unreliable.f1));
}

TEST_CASE("metrics are invariant under renaming the domains") {
    Labels gold, pred, gold2, pred2;
    const ReliabilityLabel seq[]{ReliabilityLabel::Reliable, ReliabilityLabel::Unreliable,
                                 ReliabilityLabel::Reliable, ReliabilityLabel::Reliable,
                                 ReliabilityLabel::Unreliable};
    for (int i = 0; i < 5; ++i) {
        gold.emplace(id("x" + std::to_string(i) + ".test"), seq[i]);
        pred.emplace(id("x" + std::to_string(i) + ".test"), seq[(i + 1) % 5]);
        // same pairs under permuted names
        gold2.emplace(id("z" + std::to_string(9 - i) + ".test"), seq[i]);
        pred2.emplace(id("z" + std::to_string(9 - i) + ".test"), seq[(i + 1) % 5]);
    }
    auto m1 = metrics(pred, gold);
    auto m2 = metrics(pred2, gold2);
    CHECK(m1.accuracy == m2.accuracy);
    CHECK(m1.macro.f1 == m2.macro.f1);
    CHECK(m1.reliable.precision == m2.reliable.precision);
}

TEST_CASE("mismatched key sets are rejected") {
    Labels gold{{id("a.test"), ReliabilityLabel::Reliable}};
    Labels pred{{id("b.test"), ReliabilityLabel::Reliable}};
    CHECK_THROWS_AS(metrics(pred, gold), std::invalid_argument);
    Labels extra{{id("a.test"), ReliabilityLabel::Reliable},
                 {id("b.test"), ReliabilityLabel::Reliable}};
    CHECK_THROWS_AS(metrics(extra, gold), std::invalid_argument);
}
