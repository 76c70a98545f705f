#include <catch2/catch.hpp>

#include <array>
#include <sstream>

#include "relnet/graph.hpp"
#include "relnet/labels.hpp"

using namespace relnet;

namespace {

SourceId id(const char* s) { return SourceId::canonical(s); }

LabeledDataset load(const std::string& csv, const std::string& name = "test") {
    std::istringstream in(csv);
    return load_labels(in, name, name + ".csv");
}

} // namespace

TEST_CASE("label csv loads with case-insensitive labels") {
    auto ds = load("domain,label\nbbc.co.uk,reliable\nX.com,Mixed\ny.com,UNRELIABLE\n");
    CHECK(ds.size() == 3);
    CHECK(ds.entries.at(id("bbc.co.uk")).label == ReliabilityLabel::Reliable);
    CHECK(ds.entries.at(id("x.com")).label == ReliabilityLabel::Mixed);
    CHECK(ds.entries.at(id("y.com")).label == ReliabilityLabel::Unreliable);
    CHECK(ds.entries.at(id("x.com")).origin == "test");
}

TEST_CASE("a utf-8 byte order mark before the header is tolerated") {
    auto ds = load("\xEF\xBB\xBF" "domain,label\na.com,reliable\n");
    CHECK(ds.size() == 1);
    std::istringstream scores("\xEF\xBB\xBF" "domain,score\na.com,50\n");
    CHECK(load_scores_csv(scores).size() == 1);
}

TEST_CASE("origin column overrides the dataset tag") {
    auto ds = load("domain,label,origin\na.com,reliable,mbfc\nb.com,mixed,wikipedia\n");
    CHECK(ds.entries.at(id("a.com")).origin == "mbfc");
    CHECK(ds.entries.at(id("b.com")).origin == "wikipedia");
}

TEST_CASE("unknown labels and duplicates are rejected") {
    CHECK_THROWS_WITH(load("domain,label\nx.com,bogus\n"), Catch::Contains("unknown label"));
    CHECK_THROWS_WITH(load("domain,label\na.com,reliable\nwww.a.com,mixed\n"),
                      Catch::Contains("duplicate"));
    CHECK_THROWS_WITH(load("domain,score\na.com,1\n"), Catch::Contains("header"));
    CHECK_THROWS_WITH(load("domain,label\na.com\n"), Catch::Contains("fields"));
}

TEST_CASE("class tallies are exact on a large synthetic file") {
    std::ostringstream csv;
    csv << "domain,label\n";
    for (int i = 0; i < 1630; ++i) csv << "rel" << i << ".test,reliable\n";
    for (int i = 0; i < 166; ++i) csv << "unrel" << i << ".test,unreliable\n";
    auto ds = load(csv.str());
    CHECK(ds.count(ReliabilityLabel::Reliable) == 1630);
    CHECK(ds.count(ReliabilityLabel::Unreliable) == 166);
    CHECK(ds.count(ReliabilityLabel::Mixed) == 0);
}

TEST_CASE("merge respects the precedence order on conflicts") {
    auto mbfc = load("domain,label\nx.com,mixed\n", "mbfc");
    auto fakenews = load("domain,label\nx.com,unreliable\n", "fakenews");
    std::array<LabeledDataset, 2> parts{mbfc, fakenews};
    auto merged = merge_datasets(parts, {"fakenews", "mbfc"});
    CHECK(merged.merged.entries.at(id("x.com")).label == ReliabilityLabel::Unreliable);
    CHECK(merged.conflicts == 1);

    std::array<LabeledDataset, 2> reversed{fakenews, mbfc};
    auto same = merge_datasets(reversed, {"fakenews", "mbfc"});
    CHECK(same.merged.entries.at(id("x.com")).label == ReliabilityLabel::Unreliable);
}

TEST_CASE("merge of disjoint datasets is the union") {
    auto a = load("domain,label\na.com,reliable\n", "a");
    auto b = load("domain,label\nb.com,mixed\n", "b");
    std::array<LabeledDataset, 2> parts{a, b};
    auto merged = merge_datasets(parts, {"a", "b"});
    CHECK(merged.merged.size() == 2);
    CHECK(merged.conflicts == 0);
}

TEST_CASE("merge is idempotent on a single dataset") {
    auto a = load("domain,label\na.com,reliable\nb.com,mixed\n", "a");
    std::array<LabeledDataset, 1> one{a};
    auto merged = merge_datasets(one, {"a"});
    CHECK(merged.merged.entries == a.entries);
    CHECK(merged.conflicts == 0);
}

TEST_CASE("merge rejects origins missing from the precedence list") {
    auto a = load("domain,label\na.com,reliable\n", "mystery");
    std::array<LabeledDataset, 1> one{a};
    CHECK_THROWS_AS(merge_datasets(one, {"mbfc"}), std::invalid_argument);
}

TEST_CASE("four disjoint constituent datasets merge to their total size") {
    // shaped like the four real constituents: 4138 + 553 + 556 + 85 = 5332
    auto make = [](const char* tag, int n, int start) {
        LabeledDataset ds;
        ds.name = tag;
        for (int i = 0; i < n; ++i)
            ds.entries.emplace(SourceId::canonical("d" + std::to_string(start + i) + ".test"),
                               LabeledDataset::Entry{ReliabilityLabel::Reliable, tag});
        return ds;
    };
    std::array<LabeledDataset, 4> parts{make("mbfc", 4138, 0), make("wikipedia", 553, 10000),
                                        make("fakenews", 556, 20000),
                                        make("newsguard", 85, 30000)};
    auto merged = merge_datasets(parts, {"newsguard", "fakenews", "wikipedia", "mbfc"});
    CHECK(merged.merged.size() == 5332);
}

TEST_CASE("rewards map labels to the three-valued signal") {
    auto ds = load("domain,label\na.com,reliable\nb.com,mixed\nc.com,unreliable\n");
    auto strict = to_rewards(ds, RewardPolicy::Strict);
    CHECK(strict.value(id("a.com")) == 1);
    CHECK(strict.value(id("b.com")) == 0);
    CHECK(strict.value(id("c.com")) == -1);
    CHECK(strict.value(id("absent.com")) == 0); // total lookup

    auto merged = to_rewards(ds, RewardPolicy::Merged);
    CHECK(merged.value(id("b.com")) == -1);

    std::size_t positive = 0;
    for (const auto& [d, v] : merged.nonzero()) positive += (v == 1);
    CHECK(positive == ds.count(ReliabilityLabel::Reliable));
}

TEST_CASE("expsets restrict to the graph and binarize per mode") {
    GraphBuilder b;
    b.add_links(id("rel.com"), id("mixed.com"), 1);
    b.add_links(id("mixed.com"), id("unrel.com"), 1);
    auto g = b.normalize();

    auto ds = load("domain,label\nrel.com,reliable\nmixed.com,mixed\nunrel.com,unreliable\n"
                   "offgraph.com,reliable\n");

    auto b_set = build_expset(ds, g, ExpsetMode::B);
    CHECK(b_set.reliable == 1);
    CHECK(b_set.unreliable == 2); // mixed merged into unreliable
    CHECK(b_set.out_of_graph == 1);
    CHECK(b_set.dataset.entries.at(id("mixed.com")).label == ReliabilityLabel::Unreliable);

    auto bminus = build_expset(ds, g, ExpsetMode::BMinus);
    CHECK(bminus.reliable == 1);
    CHECK(bminus.unreliable == 1);
    CHECK(bminus.dropped_mixed == 1);
    // B-minus unreliable + dropped mixed == B unreliable
    CHECK(bminus.unreliable + bminus.dropped_mixed == b_set.unreliable);
}

TEST_CASE("expset tallies match the reference composition") {
    // in-graph composition 1630 reliable / 321 mixed / 166 unreliable:
    // B -> 1630/487, B-minus -> 1630/166
    GraphBuilder b;
    std::ostringstream csv;
    csv << "domain,label\n";
    auto add = [&](const char* stem, int n, const char* label) {
        for (int i = 0; i < n; ++i) {
            const auto name = std::string(stem) + std::to_string(i) + ".test";
            b.add_links(SourceId::canonical(name), id("hub.test"), 1);
            csv << name << "," << label << "\n";
        }
    };
    add("rel", 1630, "reliable");
    add("mix", 321, "mixed");
    add("unr", 166, "unreliable");
    auto g = b.normalize();
    auto ds = load(csv.str());

    auto b_set = build_expset(ds, g, ExpsetMode::B);
    CHECK(b_set.reliable == 1630);
    CHECK(b_set.unreliable == 487);
    auto bminus = build_expset(ds, g, ExpsetMode::BMinus);
    CHECK(bminus.reliable == 1630);
    CHECK(bminus.unreliable == 166);
}

TEST_CASE("expset errors when nothing remains") {
    GraphBuilder b;
    b.add_links(id("a.com"), id("b.com"), 1);
    auto g = b.normalize();
    auto off = load("domain,label\nz.com,reliable\n");
    CHECK_THROWS_AS(build_expset(off, g, ExpsetMode::B), std::invalid_argument);
    auto only_mixed = load("domain,label\na.com,mixed\n");
    CHECK_THROWS_AS(build_expset(only_mixed, g, ExpsetMode::BMinus), std::invalid_argument);
}

TEST_CASE("score csv enforces range and format") {
    auto loadscores = [](const std::string& text) {
        std::istringstream in(text);
        return load_scores_csv(in, "scores.csv");
    };
    auto s = loadscores("domain,score\nbbc.co.uk,100\nsputniknews.com,7.5\n");
    CHECK(s.at(id("bbc.co.uk")) == 100.0);
    CHECK(s.at(id("sputniknews.com")) == 7.5);
    CHECK_THROWS_WITH(loadscores("domain,score\na.com,101\n"), Catch::Contains("range"));
    CHECK_THROWS_WITH(loadscores("domain,score\na.com,n/a\n"), Catch::Contains("number"));
    CHECK_THROWS_WITH(loadscores("domain,label\na.com,5\n"), Catch::Contains("header"));
}
