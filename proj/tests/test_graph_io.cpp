#include <catch2/catch.hpp>

#include <sstream>

#include "relnet/graph_io.hpp"
#include "support/generators.hpp"

using relnet::GraphBuilder;
using relnet::NodeId;
using relnet::ParseError;
using relnet::SourceId;

namespace {
SourceId id(const char* s) { return SourceId::canonical(s); }
} // namespace

TEST_CASE("edge list format is tab-separated and sorted") {
    GraphBuilder b;
    b.add_links(id("b.com"), id("a.com"), 1);
    b.add_links(id("a.com"), id("b.com"), 2);
    std::ostringstream out;
    relnet::save_edges(b.normalize(), out);
    CHECK(out.str() == "a.com\tb.com\t2\nb.com\ta.com\t1\n");
}

TEST_CASE("round-trip preserves all counts on random graphs") {
    for (std::uint64_t seed : {101u, 202u}) {
        auto g = testgen::random_graph(50, 0.4, seed); // ~1000+ edges
        std::ostringstream out;
        relnet::save_edges(g, out);
        std::istringstream in(out.str());
        auto back = relnet::load_edges(in);
        REQUIRE(back.domains() == g.domains());
        REQUIRE(back.edge_count() == g.edge_count());
        for (std::size_t s = 0; s < g.node_count(); ++s) {
            auto r1 = g.out_edges(static_cast<NodeId>(s));
            auto r2 = back.out_edges(static_cast<NodeId>(s));
            auto i1 = r1.begin(), i2 = r2.begin();
            for (; i1 != r1.end(); ++i1, ++i2) {
                CHECK((*i1).dst == (*i2).dst);
                CHECK((*i1).count == (*i2).count);
            }
        }
        // serialization is byte-deterministic
        std::ostringstream out2;
        relnet::save_edges(back, out2);
        CHECK(out.str() == out2.str());
    }
}

TEST_CASE("malformed lines are rejected with their line number") {
    auto load = [](const std::string& text) {
        std::istringstream in(text);
        return relnet::load_edges(in, false, "edges.tsv");
    };
    CHECK_THROWS_WITH(load("a.com\tb.com\t-1\n"), Catch::Contains("edges.tsv:1"));
    CHECK_THROWS_WITH(load("a.com\tb.com\t0\n"), Catch::Contains("positive integer"));
    CHECK_THROWS_WITH(load("a.com\tb.com\n"), Catch::Contains("3 tab-separated"));
    CHECK_THROWS_WITH(load("a.com\tb.com\t1\tx\n"), Catch::Contains("3 tab-separated"));
    CHECK_THROWS_WITH(load("a.com\tb.com\t2\na.com\tb.com\t3\n"), Catch::Contains("duplicate"));
    CHECK_THROWS_WITH(load("a.com\tb.com\tfive\n"), Catch::Contains("positive integer"));
    CHECK_THROWS_AS(load("a.com\ta.com\t1\n"), ParseError); // self-link under default policy
}

TEST_CASE("weights file prints round-trippable decimals") {
    GraphBuilder b;
    b.add_links(id("a.com"), id("b.com"), 1);
    b.add_links(id("a.com"), id("c.com"), 2);
    std::ostringstream out;
    relnet::save_weights(b.normalize(), out);
    CHECK(out.str().find("a.com\tc.com\t0.6666666666666666\n") != std::string::npos);
}
