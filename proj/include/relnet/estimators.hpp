#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relnet/error.hpp"
#include "relnet/graph.hpp"
#include "relnet/labels.hpp"
#include "relnet/parallel.hpp"

namespace relnet {

enum class Strategy { F, P, FP, I, AvgPFp, PageRank };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::F: return "f";
        case Strategy::P: return "p";
        case Strategy::FP: return "fp";
        case Strategy::I: return "i";
        case Strategy::AvgPFp: return "avg-p-fp";
        case Strategy::PageRank: return "pagerank";
    }
    return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
    auto t = detail::lower(s);
    if (t == "f") return Strategy::F;
    if (t == "p") return Strategy::P;
    if (t == "fp") return Strategy::FP;
    if (t == "i") return Strategy::I;
    if (t == "avg-p-fp" || t == "avg") return Strategy::AvgPFp;
    if (t == "pagerank") return Strategy::PageRank;
    return std::nullopt;
}

struct EstimatorConfig {
    double gamma = 0.3;   // discount factor, in [0, 1)
    int hops = 1;         // invest/collect rounds, >= 1
    double tol = 1e-8;    // stop when max |rho' - rho| drops below this
    int max_iter = 10'000;

    // When combining P and FP, the FP side may use its own discount; unset
    // means "same as gamma".
    std::optional<double> gamma_fp;

    // Worker threads for the per-node sweeps. Not part of the mathematical
    // configuration; results are identical for any value.
    unsigned threads = 1;

    void check() const {
        if (!(gamma >= 0.0) || gamma >= 1.0)
            throw ConfigError("gamma must be in [0, 1), got " + std::to_string(gamma));
        if (gamma_fp && (!(*gamma_fp >= 0.0) || *gamma_fp >= 1.0))
            throw ConfigError("gamma-fp must be in [0, 1)");
        if (hops < 1) throw ConfigError("n must be >= 1");
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
        if (max_iter < 1) throw ConfigError("max-iter must be >= 1");
    }
};

struct ScoreMeta {
    std::string strategy;
    EstimatorConfig config;
    int iterations = 0;
    double residual = 0.0; // final max |rho' - rho|
};

/// Estimated reliability degrees, dense over the graph's node ids.
struct ReliabilityScores {
    std::vector<double> rho;
    ScoreMeta meta;
};

namespace detail {

inline std::vector<double> clip_negative(std::vector<double> r) {
    for (auto& v : r) v = std::min(v, 0.0);
    return r;
}

inline std::vector<double> clip_positive(std::vector<double> r) {
    for (auto& v : r) v = std::max(v, 0.0);
    return r;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace detail

/// Future-looking degrees: the fixed point of
///   rho(s) = sum_{s'} w(s,s') * [r(s') + gamma * rho(s')]
/// computed by synchronous whole-vector iteration from rho = 0. Sources
/// with no outbound links stay at 0 (empty sum).
inline ReliabilityScores f_reliability(const SourceGraph& g, const std::vector<double>& rewards,
                                       const EstimatorConfig& cfg = {}) {
    cfg.check();
    const std::size_t n = g.node_count();
    if (rewards.size() != n) throw std::invalid_argument("reward vector size != node count");

    std::vector<double> rho(n, 0.0), next(n, 0.0);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        parallel_for(n, cfg.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t s = b; s < e; ++s) {
                double acc = 0.0;
                for (auto edge : g.out_edges(static_cast<NodeId>(s)))
                    acc += edge.weight * (rewards[edge.dst] + cfg.gamma * rho[edge.dst]);
                next[s] = acc;
            }
        });
        const double delta = detail::max_abs_diff(next, rho);
        rho.swap(next);
        if (delta < cfg.tol)
            return {std::move(rho), {"f", cfg, iter, delta}};
    }
    throw ConvergenceError("f-reliability did not converge", detail::max_abs_diff(rho, next),
                           cfg.max_iter);
}

/// Past-looking degrees: the fixed point of the reversed recurrence
///   rho(s) = r(s) + gamma * sum_{s'} w(s',s) * rho(s')
/// where w(s',s) is the forward-normalized weight of the inbound edge.
inline ReliabilityScores p_reliability(const SourceGraph& g, const std::vector<double>& rewards,
                                       const EstimatorConfig& cfg = {}) {
    cfg.check();
    const std::size_t n = g.node_count();
    if (rewards.size() != n) throw std::invalid_argument("reward vector size != node count");

    std::vector<double> rho(n, 0.0), next(n, 0.0);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        parallel_for(n, cfg.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t s = b; s < e; ++s) {
                double acc = 0.0;
                for (auto edge : g.in_edges(static_cast<NodeId>(s)))
                    acc += edge.src_out_weight * rho[edge.src];
                next[s] = rewards[s] + cfg.gamma * acc;
            }
        });
        const double delta = detail::max_abs_diff(next, rho);
        rho.swap(next);
        if (delta < cfg.tol)
            return {std::move(rho), {"p", cfg, iter, delta}};
    }
    throw ConvergenceError("p-reliability did not converge", detail::max_abs_diff(rho, next),
                           cfg.max_iter);
}

/// Asymmetric combination: forward propagation of the negative rewards plus
/// backward propagation of the positive ones,
///   rho = V(min(r,0)) + R(max(r,0)),
/// summed componentwise with no further adjustment.
inline ReliabilityScores fp_reliability(const SourceGraph& g, const std::vector<double>& rewards,
                                        const EstimatorConfig& cfg = {}) {
    auto v_neg = f_reliability(g, detail::clip_negative(rewards), cfg);
    auto r_pos = p_reliability(g, detail::clip_positive(rewards), cfg);
    ReliabilityScores out;
    out.rho.resize(g.node_count());
    for (std::size_t i = 0; i < out.rho.size(); ++i)
        out.rho[i] = v_neg.rho[i] + r_pos.rho[i];
    out.meta = {"fp", cfg, std::max(v_neg.meta.iterations, r_pos.meta.iterations),
                std::max(v_neg.meta.residual, r_pos.meta.residual)};
    return out;
}

/// Invest-and-collect degrees. Starting from rho = r, each round first lets
/// every source invest its current rho along its outbound weights,
///   totalcredits(s) = sum_{s'} w(s',s) * rho(s'),
/// then pays each investor back in proportion to its inbound share,
///   rho(s) += sum_{s'} w(s,s') * w_s(s') * totalcredits(s'),
/// with all totalcredits taken from the round-start rho. Runs exactly
/// `hops` rounds; a source with no outbound links never changes.
inline ReliabilityScores i_reliability(const SourceGraph& g, const std::vector<double>& rewards,
                                       const EstimatorConfig& cfg = {}) {
    cfg.check();
    const std::size_t n = g.node_count();
    if (rewards.size() != n) throw std::invalid_argument("reward vector size != node count");

    std::vector<double> rho = rewards;
    std::vector<double> totalcredits(n, 0.0), profit(n, 0.0);
    double last_delta = 0.0;
    for (int round = 0; round < cfg.hops; ++round) {
        parallel_for(n, cfg.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t s = b; s < e; ++s) {
                double acc = 0.0;
                for (auto edge : g.in_edges(static_cast<NodeId>(s)))
                    acc += edge.src_out_weight * rho[edge.src];
                totalcredits[s] = acc;
            }
        });
        parallel_for(n, cfg.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t s = b; s < e; ++s) {
                double acc = 0.0;
                for (auto edge : g.out_edges(static_cast<NodeId>(s)))
                    acc += edge.weight * edge.dst_in_weight * totalcredits[edge.dst];
                profit[s] = acc;
            }
        });
        last_delta = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            rho[s] += profit[s];
            last_delta = std::max(last_delta, std::abs(profit[s]));
        }
    }
    return {std::move(rho), {"i", cfg, cfg.hops, last_delta}};
}

/// Damped PageRank over the outbound weights. Mass of dangling nodes is
/// redistributed uniformly; the result sums to 1.
inline ReliabilityScores pagerank(const SourceGraph& g, double damping = 0.85,
                                  double tol = 1e-12, int max_iter = 10'000,
                                  unsigned threads = 1) {
    if (!(damping >= 0.0) || damping >= 1.0)
        throw ConfigError("damping must be in [0, 1)");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    const std::size_t n = g.node_count();
    if (n == 0) return {{}, {"pagerank", {}, 0, 0.0}};

    std::vector<double> pr(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
    EstimatorConfig meta_cfg;
    meta_cfg.gamma = damping;
    meta_cfg.tol = tol;
    meta_cfg.max_iter = max_iter;
    meta_cfg.threads = threads;

    for (int iter = 1; iter <= max_iter; ++iter) {
        // Order-fixed sequential reduction keeps the result independent of
        // the thread count.
        double dangling = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            if (g.out_degree(static_cast<NodeId>(s)) == 0) dangling += pr[s];

        const double base = (1.0 - damping) / static_cast<double>(n)
                            + damping * dangling / static_cast<double>(n);
        parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t s = b; s < e; ++s) {
                double acc = 0.0;
                for (auto edge : g.in_edges(static_cast<NodeId>(s)))
                    acc += edge.src_out_weight * pr[edge.src];
                next[s] = base + damping * acc;
            }
        });

        double l1 = 0.0;
        for (std::size_t s = 0; s < n; ++s) l1 += std::abs(next[s] - pr[s]);
        pr.swap(next);
        if (l1 < tol) {
            double sum = 0.0;
            for (double v : pr) sum += v;
            for (auto& v : pr) v /= sum;
            return {std::move(pr), {"pagerank", meta_cfg, iter, l1}};
        }
    }
    throw ConvergenceError("pagerank did not converge", 0.0, max_iter);
}

/// Mean of two score vectors over the same node set.
inline ReliabilityScores average_strategies(const ReliabilityScores& a,
                                            const ReliabilityScores& b) {
    if (a.rho.size() != b.rho.size())
        throw std::invalid_argument("average_strategies: node coverage differs");
    ReliabilityScores out;
    out.rho.resize(a.rho.size());
    for (std::size_t i = 0; i < a.rho.size(); ++i) out.rho[i] = 0.5 * (a.rho[i] + b.rho[i]);
    out.meta = a.meta;
    out.meta.strategy = a.meta.strategy + "+" + b.meta.strategy;
    out.meta.iterations = std::max(a.meta.iterations, b.meta.iterations);
    out.meta.residual = std::max(a.meta.residual, b.meta.residual);
    return out;
}

/// Runs the named strategy. AvgPFp averages a P run (gamma) with an FP run
/// (gamma_fp when set, else gamma). PageRank ignores the rewards.
inline ReliabilityScores estimate(Strategy strategy, const SourceGraph& g,
                                  const std::vector<double>& rewards,
                                  const EstimatorConfig& cfg = {}) {
    switch (strategy) {
        case Strategy::F: return f_reliability(g, rewards, cfg);
        case Strategy::P: return p_reliability(g, rewards, cfg);
        case Strategy::FP: return fp_reliability(g, rewards, cfg);
        case Strategy::I: return i_reliability(g, rewards, cfg);
        case Strategy::AvgPFp: {
            EstimatorConfig fp_cfg = cfg;
            if (cfg.gamma_fp) fp_cfg.gamma = *cfg.gamma_fp;
            auto avg = average_strategies(p_reliability(g, rewards, cfg),
                                          fp_reliability(g, rewards, fp_cfg));
            avg.meta.strategy = "avg-p-fp";
            avg.meta.config = cfg;
            return avg;
        }
        case Strategy::PageRank:
            return pagerank(g, 0.85, cfg.tol, cfg.max_iter, cfg.threads);
    }
    throw std::logic_error("unknown strategy");
}

/// Rescales into [-1, 1]: positives divided by the maximum positive value,
/// negatives by the magnitude of the minimum; zeros are untouched. Order is
/// preserved within each sign. All-zero input is returned unchanged.
inline std::vector<double> normalize_scores(const std::vector<double>& rho) {
    double max_pos = 0.0, min_neg = 0.0;
    for (double v : rho) {
        max_pos = std::max(max_pos, v);
        min_neg = std::min(min_neg, v);
    }
    std::vector<double> out(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] > 0.0)
            out[i] = rho[i] / max_pos;
        else if (rho[i] < 0.0)
            out[i] = rho[i] / -min_neg;
        else
            out[i] = rho[i];
    }
    return out;
}

/// Sign-threshold classification: rho > 0 is reliable, rho <= 0 unreliable.
inline ReliabilityLabel classify_value(double rho) {
    return rho > 0.0 ? ReliabilityLabel::Reliable : ReliabilityLabel::Unreliable;
}

inline std::map<SourceId, ReliabilityLabel> classify(const SourceGraph& g,
                                                     const ReliabilityScores& scores) {
    if (scores.rho.size() != g.node_count())
        throw std::invalid_argument("classify: scores do not cover the graph");
    std::map<SourceId, ReliabilityLabel> out;
    for (std::size_t s = 0; s < g.node_count(); ++s)
        out.emplace(SourceId::canonical(g.domain(static_cast<NodeId>(s))),
                    classify_value(scores.rho[s]));
    return out;
}

/// Classification of a single queried domain. Sources outside the graph get
/// rho = 0, i.e. unreliable with the indeterminate flag set: their
/// reliability is unknown rather than measured.
struct QueryResult {
    double rho = 0.0;
    ReliabilityLabel label = ReliabilityLabel::Unreliable;
    bool in_graph = false;
    bool indeterminate = true;
};

inline QueryResult classify_query(const SourceGraph& g, const ReliabilityScores& scores,
                                  const SourceId& id) {
    QueryResult q;
    if (auto node = g.find(id)) {
        q.rho = scores.rho[*node];
        q.in_graph = true;
        q.indeterminate = false;
        q.label = classify_value(q.rho);
    }
    return q;
}

} // namespace relnet
