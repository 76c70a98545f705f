#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relnet/error.hpp"
#include "relnet/source_id.hpp"

namespace relnet {

using NodeId = std::uint32_t;

/// Immutable weighted directed graph over news-source domains.
///
/// Nodes are assigned ids in lexicographic domain order, so a graph built
/// from the same multiset of links is identical regardless of insertion
/// order. Edges are kept in two CSR layouts (outbound and inbound); both
/// carry the raw link count plus the two normalized weights that the
/// propagation strategies need:
///
///   out_weight(s,d)  -- share of s's outbound links that point to d
///   in_weight(d,s)   -- share of d's inbound links that come from s
///
/// After construction the graph is immutable and safe to share across
/// threads without synchronization.
class SourceGraph {
public:
    struct OutEdge {
        NodeId dst;
        std::uint64_t count;
        double weight;        // w(s, dst): outbound proportion at s
        double dst_in_weight; // w_s(dst): inbound proportion at dst from s
    };

    struct InEdge {
        NodeId src;
        std::uint64_t count;
        double weight;         // w_s(src): inbound proportion at s from src
        double src_out_weight; // w(src, s): outbound proportion at src
    };

    SourceGraph() = default;

    std::size_t node_count() const noexcept { return domains_.size(); }
    std::size_t edge_count() const noexcept { return out_dst_.size(); }
    bool self_links_allowed() const noexcept { return allow_self_links_; }

    const std::string& domain(NodeId id) const { return domains_[id]; }
    const std::vector<std::string>& domains() const noexcept { return domains_; }

    std::optional<NodeId> find(const SourceId& id) const {
        auto it = std::lower_bound(domains_.begin(), domains_.end(), id.str());
        if (it == domains_.end() || *it != id.str()) return std::nullopt;
        return static_cast<NodeId>(it - domains_.begin());
    }

    std::size_t out_degree(NodeId s) const { return out_off_[s + 1] - out_off_[s]; }
    std::size_t in_degree(NodeId s) const { return in_off_[s + 1] - in_off_[s]; }

    struct OutRange {
        const SourceGraph* g;
        std::size_t begin_, end_;
        struct Iter {
            const SourceGraph* g;
            std::size_t i;
            OutEdge operator*() const {
                return {g->out_dst_[i], g->out_count_[i], g->out_weight_[i], g->out_dst_in_weight_[i]};
            }
            Iter& operator++() { ++i; return *this; }
            bool operator!=(const Iter& o) const { return i != o.i; }
        };
        Iter begin() const { return {g, begin_}; }
        Iter end() const { return {g, end_}; }
    };

    struct InRange {
        const SourceGraph* g;
        std::size_t begin_, end_;
        struct Iter {
            const SourceGraph* g;
            std::size_t i;
            InEdge operator*() const {
                return {g->in_src_[i], g->in_count_[i], g->in_weight_[i], g->in_src_out_weight_[i]};
            }
            Iter& operator++() { ++i; return *this; }
            bool operator!=(const Iter& o) const { return i != o.i; }
        };
        Iter begin() const { return {g, begin_}; }
        Iter end() const { return {g, end_}; }
    };

    OutRange out_edges(NodeId s) const { return {this, out_off_[s], out_off_[s + 1]}; }
    InRange in_edges(NodeId s) const { return {this, in_off_[s], in_off_[s + 1]}; }

    std::uint64_t count(const SourceId& src, const SourceId& dst) const {
        auto s = find(src), d = find(dst);
        if (!s || !d) return 0;
        for (auto e : out_edges(*s))
            if (e.dst == *d) return e.count;
        return 0;
    }

    double out_weight(const SourceId& src, const SourceId& dst) const {
        auto s = find(src), d = find(dst);
        if (!s || !d) return 0.0;
        for (auto e : out_edges(*s))
            if (e.dst == *d) return e.weight;
        return 0.0;
    }

    double in_weight(const SourceId& dst, const SourceId& src) const {
        auto d = find(dst), s = find(src);
        if (!s || !d) return 0.0;
        for (auto e : in_edges(*d))
            if (e.src == *s) return e.weight;
        return 0.0;
    }

    /// Checks the structural invariants: weight rows sum to 1 (within tol)
    /// for every node with edges, every count is positive, and the two CSR
    /// layouts mirror each other. Throws std::logic_error on violation.
    void validate(double tol = 1e-9) const;

private:
    friend class GraphBuilder;

    std::vector<std::string> domains_; // sorted, index == NodeId

    std::vector<std::size_t> out_off_; // size n+1
    std::vector<NodeId> out_dst_;
    std::vector<std::uint64_t> out_count_;
    std::vector<double> out_weight_;
    std::vector<double> out_dst_in_weight_;

    std::vector<std::size_t> in_off_; // size n+1
    std::vector<NodeId> in_src_;
    std::vector<std::uint64_t> in_count_;
    std::vector<double> in_weight_;
    std::vector<double> in_src_out_weight_;

    bool allow_self_links_ = false;
};

/// Accumulates raw link counts; normalize() produces the immutable graph.
/// Counts are exact 64-bit integers; weights only exist on the built graph,
/// so there is no stale-weight state to manage.
class GraphBuilder {
public:
    explicit GraphBuilder(bool allow_self_links = false)
        : allow_self_links_(allow_self_links) {}

    bool self_links_allowed() const noexcept { return allow_self_links_; }

    /// Ensures a node exists even if no edge ever touches it (sink-only or
    /// isolated sources stay in the graph with zero edges).
    void touch(const SourceId& id) { intern(id.str()); }

    /// Adds `count` parallel links src -> dst. count must be >= 1; a
    /// self-link is rejected unless the builder allows them.
    void add_links(const SourceId& src, const SourceId& dst, std::uint64_t count = 1) {
        if (count == 0) throw std::invalid_argument("add_links: count must be >= 1");
        if (src == dst && !allow_self_links_)
            throw std::invalid_argument("add_links: self-link " + src.str()
                                        + " -> " + dst.str() + " is disabled");
        NodeId s = intern(src.str());
        NodeId d = intern(dst.str());
        counts_[s][d] += count;
    }

    std::size_t node_count() const noexcept { return names_.size(); }

    /// Builds the normalized immutable graph. Idempotent: the builder is
    /// not consumed and repeated calls return identical graphs.
    SourceGraph normalize() const;

private:
    NodeId intern(const std::string& name) {
        auto [it, inserted] = ids_.try_emplace(name, static_cast<NodeId>(names_.size()));
        if (inserted) {
            names_.push_back(name);
            counts_.emplace_back();
        }
        return it->second;
    }

    bool allow_self_links_;
    std::unordered_map<std::string, NodeId> ids_;
    std::vector<std::string> names_;
    std::vector<std::unordered_map<NodeId, std::uint64_t>> counts_; // per-src adjacency
};

inline SourceGraph GraphBuilder::normalize() const {
    const std::size_t n = names_.size();

    // Node ids follow lexicographic domain order so the result does not
    // depend on insertion order.
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return names_[a] < names_[b]; });
    std::vector<NodeId> remap(n);
    for (std::size_t i = 0; i < n; ++i) remap[order[i]] = static_cast<NodeId>(i);

    SourceGraph g;
    g.allow_self_links_ = allow_self_links_;
    g.domains_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.domains_[i] = names_[order[i]];

    // Outbound CSR, destinations sorted within each row.
    g.out_off_.assign(n + 1, 0);
    std::size_t edges = 0;
    for (std::size_t i = 0; i < n; ++i) edges += counts_[order[i]].size();
    g.out_dst_.reserve(edges);
    g.out_count_.reserve(edges);

    std::vector<std::uint64_t> in_sum(n, 0);
    std::vector<std::pair<NodeId, std::uint64_t>> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (auto [dst_old, c] : counts_[order[i]]) row.emplace_back(remap[dst_old], c);
        std::sort(row.begin(), row.end());
        for (auto [dst, c] : row) {
            g.out_dst_.push_back(dst);
            g.out_count_.push_back(c);
            in_sum[dst] += c;
        }
        g.out_off_[i + 1] = g.out_dst_.size();
    }

    // Normalized outbound weights and, per edge, the inbound proportion at
    // the destination (used by the invest/collect strategy).
    g.out_weight_.resize(edges);
    g.out_dst_in_weight_.resize(edges);
    for (std::size_t s = 0; s < n; ++s) {
        std::uint64_t row_sum = 0;
        for (std::size_t e = g.out_off_[s]; e < g.out_off_[s + 1]; ++e) row_sum += g.out_count_[e];
        for (std::size_t e = g.out_off_[s]; e < g.out_off_[s + 1]; ++e) {
            g.out_weight_[e] = static_cast<double>(g.out_count_[e]) / static_cast<double>(row_sum);
            g.out_dst_in_weight_[e] =
                static_cast<double>(g.out_count_[e]) / static_cast<double>(in_sum[g.out_dst_[e]]);
        }
    }

    // Inbound CSR mirror, sources sorted within each row (a stable scan of
    // the outbound CSR in src order yields exactly that).
    g.in_off_.assign(n + 1, 0);
    for (std::size_t e = 0; e < edges; ++e) g.in_off_[g.out_dst_[e] + 1]++;
    for (std::size_t i = 0; i < n; ++i) g.in_off_[i + 1] += g.in_off_[i];

    g.in_src_.resize(edges);
    g.in_count_.resize(edges);
    g.in_weight_.resize(edges);
    g.in_src_out_weight_.resize(edges);
    std::vector<std::size_t> fill(g.in_off_.begin(), g.in_off_.end() - 1);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t e = g.out_off_[s]; e < g.out_off_[s + 1]; ++e) {
            const NodeId d = g.out_dst_[e];
            const std::size_t f = fill[d]++;
            g.in_src_[f] = static_cast<NodeId>(s);
            g.in_count_[f] = g.out_count_[e];
            g.in_weight_[f] =
                static_cast<double>(g.out_count_[e]) / static_cast<double>(in_sum[d]);
            g.in_src_out_weight_[f] = g.out_weight_[e];
        }
    }

    return g;
}

inline void SourceGraph::validate(double tol) const {
    const std::size_t n = node_count();
    for (std::size_t s = 0; s < n; ++s) {
        if (out_degree(static_cast<NodeId>(s)) > 0) {
            double sum = 0;
            for (auto e : out_edges(static_cast<NodeId>(s))) {
                if (e.count == 0) throw std::logic_error("zero-count edge");
                sum += e.weight;
            }
            if (std::abs(sum - 1.0) > tol)
                throw std::logic_error("outbound weights of " + domains_[s] + " sum to "
                                       + std::to_string(sum));
        }
        if (in_degree(static_cast<NodeId>(s)) > 0) {
            double sum = 0;
            for (auto e : in_edges(static_cast<NodeId>(s))) sum += e.weight;
            if (std::abs(sum - 1.0) > tol)
                throw std::logic_error("inbound weights of " + domains_[s] + " sum to "
                                       + std::to_string(sum));
        }
    }
    // CSR mirror consistency: total counts agree per (src, dst).
    std::uint64_t total_out = 0, total_in = 0;
    for (auto c : out_count_) total_out += c;
    for (auto c : in_count_) total_in += c;
    if (total_out != total_in) throw std::logic_error("in/out CSR count mismatch");
}

/// Sums raw counts edge-wise across graphs (node set = union) and
/// re-normalizes. Associative and commutative at the count level. All
/// inputs must share the self-link policy.
inline SourceGraph merge(std::span<const SourceGraph> graphs) {
    if (graphs.empty()) return GraphBuilder{}.normalize();
    const bool policy = graphs.front().self_links_allowed();
    for (const auto& g : graphs) {
        if (g.self_links_allowed() != policy)
            throw std::invalid_argument("merge: graphs disagree on self-link policy");
    }
    GraphBuilder b(policy);
    for (const auto& g : graphs) {
        for (std::size_t s = 0; s < g.node_count(); ++s) {
            const auto src = SourceId::canonical(g.domain(static_cast<NodeId>(s)));
            b.touch(src);
            for (auto e : g.out_edges(static_cast<NodeId>(s)))
                b.add_links(src, SourceId::canonical(g.domain(e.dst)), e.count);
        }
    }
    return b.normalize();
}

} // namespace relnet
