#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "relnet/estimators.hpp"
#include "relnet/graph.hpp"
#include "relnet/graph_io.hpp"

namespace relnet {

/// Score file: `domain<TAB>rho<TAB>rho_normalized`, sorted by rho
/// descending (ties by domain), doubles as shortest round-trip decimals.
inline void save_scores(const SourceGraph& g, const ReliabilityScores& scores,
                        std::ostream& out) {
    if (scores.rho.size() != g.node_count())
        throw std::invalid_argument("save_scores: scores do not cover the graph");
    const auto normalized = normalize_scores(scores.rho);
    std::vector<std::size_t> order(g.node_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores.rho[a] != scores.rho[b]) return scores.rho[a] > scores.rho[b];
        return g.domain(static_cast<NodeId>(a)) < g.domain(static_cast<NodeId>(b));
    });
    for (auto s : order)
        out << g.domain(static_cast<NodeId>(s)) << '\t' << detail::format_double(scores.rho[s])
            << '\t' << detail::format_double(normalized[s]) << '\n';
}

inline void save_scores(const SourceGraph& g, const ReliabilityScores& scores,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    save_scores(g, scores, out);
    if (!out) throw ParseError("write failed: " + path);
}

struct ScoreRow {
    std::string domain;
    double rho;
    double rho_normalized;
};

inline std::vector<ScoreRow> load_scores_tsv(std::istream& in,
                                             const std::string& path = "<stream>") {
    std::vector<ScoreRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw ParseError(path, lineno, "expected 3 tab-separated fields");
        ScoreRow row;
        row.domain = line.substr(0, t1);
        try {
            row.rho = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
            row.rho_normalized = std::stod(line.substr(t2 + 1));
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "malformed score value");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<ScoreRow> load_scores_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return load_scores_tsv(in, path);
}

} // namespace relnet
