#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "relnet/graph.hpp"

namespace relnet {

namespace detail {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace detail

/// Writes the raw-count edge list: `src<TAB>dst<TAB>count`, one edge per
/// line, sorted lexicographically by (src, dst). Loading the result back
/// reproduces the graph exactly.
inline void save_edges(const SourceGraph& g, std::ostream& out) {
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        for (auto e : g.out_edges(static_cast<NodeId>(s)))
            out << g.domain(static_cast<NodeId>(s)) << '\t' << g.domain(e.dst) << '\t'
                << e.count << '\n';
    }
}

inline void save_edges(const SourceGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    save_edges(g, out);
    if (!out) throw ParseError("write failed: " + path);
}

/// Normalized outbound weights for inspection: `src<TAB>dst<TAB>weight`,
/// weight printed as the shortest round-trippable decimal.
inline void save_weights(const SourceGraph& g, std::ostream& out) {
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        for (auto e : g.out_edges(static_cast<NodeId>(s)))
            out << g.domain(static_cast<NodeId>(s)) << '\t' << g.domain(e.dst) << '\t'
                << detail::format_double(e.weight) << '\n';
    }
}

inline void save_weights(const SourceGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    save_weights(g, out);
    if (!out) throw ParseError("write failed: " + path);
}

inline SourceGraph load_edges(std::istream& in, bool allow_self_links = false,
                              const std::string& path = "<stream>") {
    GraphBuilder b(allow_self_links);
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos
            || line.find('\t', t2 + 1) != std::string::npos)
            throw ParseError(path, lineno, "expected 3 tab-separated fields");

        SourceId src = [&] {
            try {
                return SourceId::canonical(line.substr(0, t1));
            } catch (const ParseError& e) {
                throw ParseError(path, lineno, e.what());
            }
        }();
        SourceId dst = [&] {
            try {
                return SourceId::canonical(line.substr(t1 + 1, t2 - t1 - 1));
            } catch (const ParseError& e) {
                throw ParseError(path, lineno, e.what());
            }
        }();

        const std::string count_str = line.substr(t2 + 1);
        std::uint64_t count = 0;
        const char* first = count_str.data();
        const char* last = first + count_str.size();
        auto [ptr, ec] = std::from_chars(first, last, count);
        if (ec != std::errc() || ptr != last || count == 0)
            throw ParseError(path, lineno, "count must be a positive integer, got \""
                                           + count_str + "\"");

        if (!seen.emplace(src.str(), dst.str()).second)
            throw ParseError(path, lineno,
                             "duplicate edge " + src.str() + " -> " + dst.str());
        try {
            b.add_links(src, dst, count);
        } catch (const std::invalid_argument& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
    return b.normalize();
}

inline SourceGraph load_edges(const std::string& path, bool allow_self_links = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return load_edges(in, allow_self_links, path);
}

} // namespace relnet
