#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "relnet/estimators.hpp"
#include "relnet/labels.hpp"
#include "relnet/metrics.hpp"
#include "relnet/stats.hpp"

namespace relnet {

struct Fold {
    std::vector<SourceId> train;
    std::vector<SourceId> test;
};

/// Stratified k-fold split: domains of each class are shuffled with the
/// seeded generator and dealt round-robin, so per-fold class proportions
/// match the dataset within one member. Deterministic for a given seed.
inline std::vector<Fold> kfold_split(const LabeledDataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");

    std::map<ReliabilityLabel, std::vector<SourceId>> by_class;
    for (const auto& [id, e] : ds.entries) by_class[e.label].push_back(id);
    for (const auto& [label, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(k))
            throw std::invalid_argument(std::string("kfold_split: class \"") + to_string(label)
                                        + "\" has " + std::to_string(members.size())
                                        + " members, fewer than k=" + std::to_string(k));
    }

    std::mt19937_64 rng(seed);
    std::vector<std::vector<SourceId>> test_sets(k);
    for (auto& [label, members] : by_class) {
        // map iteration is label-ordered, so the RNG stream is consumed in a
        // fixed order regardless of dataset construction
        detail::seeded_shuffle(members, rng);
        for (std::size_t i = 0; i < members.size(); ++i)
            test_sets[i % k].push_back(members[i]);
    }

    std::vector<Fold> folds(k);
    for (int f = 0; f < k; ++f) {
        std::sort(test_sets[f].begin(), test_sets[f].end());
        folds[f].test = test_sets[f];
        for (int other = 0; other < k; ++other) {
            if (other == f) continue;
            folds[f].train.insert(folds[f].train.end(), test_sets[other].begin(),
                                  test_sets[other].end());
        }
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

struct EvalReport {
    std::string strategy;
    EstimatorConfig config;
    int k = 5;
    std::uint64_t seed = 0;
    std::string expset;
    std::string ensemble_with; // external predictions file, when ensembling
    std::vector<ConfusionMetrics> folds;
    ConfusionMetrics mean;
    ConfusionMetrics stddev;   // population standard deviation over folds
    ConfusionMetrics ci95;     // 1.96 * std / sqrt(k), normal approximation
    bool leak_check_passed = false;
};

namespace detail {

inline std::array<double, 10> metric_fields(const ConfusionMetrics& m) {
    return {m.reliable.precision,   m.reliable.recall,   m.reliable.f1,
            m.unreliable.precision, m.unreliable.recall, m.unreliable.f1,
            m.macro.precision,      m.macro.recall,      m.macro.f1,
            m.accuracy};
}

inline ConfusionMetrics metrics_from_fields(const std::array<double, 10>& a) {
    ConfusionMetrics m;
    m.reliable = {a[0], a[1], a[2]};
    m.unreliable = {a[3], a[4], a[5]};
    m.macro = {a[6], a[7], a[8]};
    m.accuracy = a[9];
    return m;
}

inline void aggregate(const std::vector<ConfusionMetrics>& folds, ConfusionMetrics& mean,
                      ConfusionMetrics& stddev, ConfusionMetrics& ci) {
    const double n = static_cast<double>(folds.size());
    std::array<double, 10> m{}, sd{}, hw{};
    for (const auto& f : folds) {
        const auto v = metric_fields(f);
        for (std::size_t i = 0; i < v.size(); ++i) m[i] += v[i];
    }
    for (auto& x : m) x /= n;
    for (const auto& f : folds) {
        const auto v = metric_fields(f);
        for (std::size_t i = 0; i < v.size(); ++i) sd[i] += (v[i] - m[i]) * (v[i] - m[i]);
    }
    for (std::size_t i = 0; i < sd.size(); ++i) {
        sd[i] = std::sqrt(sd[i] / n);
        hw[i] = 1.96 * sd[i] / std::sqrt(n);
    }
    mean = metrics_from_fields(m);
    stddev = metrics_from_fields(sd);
    ci = metrics_from_fields(hw);
}

} // namespace detail

/// External predictions used by the voting ensemble during CV. Must cover
/// every dataset domain.
struct EnsembleInput {
    std::map<SourceId, ReliabilityLabel> predictions;
    std::string source;
};

/// 5-fold-style protocol: per fold, rewards come from the training folds
/// only, the strategy scores the whole graph, and the held-out fold is
/// classified by sign. The leak check verifies that no test-fold domain
/// carries a nonzero reward during estimation.
inline EvalReport cross_validate(Strategy strategy, const SourceGraph& g,
                                 const LabeledDataset& dataset, const EstimatorConfig& cfg,
                                 int k, std::uint64_t seed,
                                 const EnsembleInput* ensemble = nullptr) {
    for (const auto& [id, e] : dataset.entries) {
        if (!g.find(id))
            throw std::invalid_argument("cross_validate: dataset domain " + id.str()
                                        + " is not in the graph");
    }
    if (ensemble) {
        for (const auto& [id, e] : dataset.entries) {
            if (!ensemble->predictions.count(id))
                throw std::invalid_argument("ensemble predictions missing domain " + id.str());
        }
    }

    EvalReport report;
    report.strategy = to_string(strategy);
    report.config = cfg;
    report.k = k;
    report.seed = seed;
    report.expset = dataset.name;
    if (ensemble) report.ensemble_with = ensemble->source;
    report.leak_check_passed = true;

    const auto folds = kfold_split(dataset, k, seed);
    for (const auto& fold : folds) {
        RewardAssignment rewards;
        for (const auto& id : fold.train) {
            const auto label = dataset.entries.at(id).label;
            rewards.set(id, label == ReliabilityLabel::Reliable ? +1 : -1);
        }
        const auto dense = rewards.densify(g);
        for (const auto& id : fold.test) {
            if (dense[*g.find(id)] != 0.0) report.leak_check_passed = false;
        }

        const auto scores = estimate(strategy, g, dense, cfg);
        std::map<SourceId, ReliabilityLabel> predictions, gold;
        for (const auto& id : fold.test) {
            auto pred = classify_value(scores.rho[*g.find(id)]);
            if (ensemble) {
                const auto other = ensemble->predictions.at(id);
                pred = (pred == ReliabilityLabel::Reliable && other == ReliabilityLabel::Reliable)
                           ? ReliabilityLabel::Reliable
                           : ReliabilityLabel::Unreliable;
            }
            predictions.emplace(id, pred);
            gold.emplace(id, dataset.entries.at(id).label);
        }
        report.folds.push_back(metrics(predictions, gold));
    }

    detail::aggregate(report.folds, report.mean, report.stddev, report.ci95);
    return report;
}

struct GridPoint {
    double value = 0.0; // gamma, or n for the invest/collect strategy
    double mean_macro_f1 = 0.0;
    double std_macro_f1 = 0.0;
    double ci95_half_width = 0.0;
};

struct GridSearchResult {
    std::string strategy;
    std::string hyperparameter; // "gamma" or "n"
    std::vector<GridPoint> points;
    double selected = 0.0;
    std::string selection_rule = "max-mean-macro-f1;tie->smallest";
    std::vector<EvalReport> reports; // one per grid point, same order
};

/// The published search ranges: gamma from 0.05 to 0.95 in steps of 0.05
/// (19 points) for the discounted strategies, n from 1 to 10 for
/// invest/collect.
inline std::vector<double> default_grid(Strategy s) {
    if (s == Strategy::I) {
        std::vector<double> grid(10);
        for (int i = 0; i < 10; ++i) grid[i] = static_cast<double>(i + 1);
        return grid;
    }
    std::vector<double> grid(19);
    for (int i = 0; i < 19; ++i) grid[i] = 0.05 * static_cast<double>(i + 1);
    return grid;
}

/// Cross-validates every grid point (identical folds across points) and
/// selects the value with the best mean macro-F1, breaking ties toward the
/// smaller hyperparameter.
inline GridSearchResult grid_search(Strategy strategy, const SourceGraph& g,
                                    const LabeledDataset& dataset,
                                    const std::vector<double>& grid, const EstimatorConfig& cfg,
                                    int k, std::uint64_t seed, unsigned jobs = 1) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");

    GridSearchResult result;
    result.strategy = to_string(strategy);
    result.hyperparameter = strategy == Strategy::I ? "n" : "gamma";

    auto run_point = [&](double value) {
        EstimatorConfig point_cfg = cfg;
        if (strategy == Strategy::I) {
            const int n = static_cast<int>(std::lround(value));
            if (std::abs(value - n) > 1e-9 || n < 1)
                throw ConfigError("grid for the invest/collect strategy must hold integers >= 1");
            point_cfg.hops = n;
        } else {
            point_cfg.gamma = value;
        }
        return cross_validate(strategy, g, dataset, point_cfg, k, seed);
    };

    std::vector<EvalReport> reports(grid.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) reports[i] = run_point(grid[i]);
    } else {
        // independent pure jobs; collected in grid order so scheduling
        // cannot change the result
        std::vector<std::future<EvalReport>> futs;
        futs.reserve(grid.size());
        for (double value : grid)
            futs.push_back(std::async(std::launch::async, run_point, value));
        for (std::size_t i = 0; i < grid.size(); ++i) reports[i] = futs[i].get();
    }

    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& rep = reports[i];
        result.points.push_back({grid[i], rep.mean.macro.f1, rep.stddev.macro.f1,
                                 rep.ci95.macro.f1});
        const auto& top = result.points[best];
        if (rep.mean.macro.f1 > top.mean_macro_f1
            || (rep.mean.macro.f1 == top.mean_macro_f1 && grid[i] < top.value))
            best = i;
    }
    result.selected = grid[best];
    result.reports = std::move(reports);
    return result;
}

enum class CorrelationSetting {
    WithRewards,   // all ground-truth rewards are used
    WithoutRewards // rewards zeroed exactly on the scored domains
};

inline const char* to_string(CorrelationSetting s) {
    return s == CorrelationSetting::WithRewards ? "with-rewards" : "without-rewards";
}

struct CorrelationResult {
    std::string strategy;
    std::string setting;
    double pcc = 0.0;
    double pcc_p = 1.0;
    double srcc = 0.0;
    double srcc_p = 1.0;
    std::size_t sample_size = 0;
    std::vector<std::string> excluded; // scored domains absent from the graph
};

/// Correlates estimated degrees with journalist-provided scores. Under
/// WithoutRewards the reward of every scored domain is removed before
/// estimation, so the estimate cannot lean on the evaluated domains' own
/// labels. Scored domains missing from the graph are excluded (with a
/// report); it is an error if none remain.
inline CorrelationResult correlate(Strategy strategy, const SourceGraph& g,
                                   const LabeledDataset& dataset,
                                   const std::map<SourceId, double>& journalist_scores,
                                   CorrelationSetting setting, const EstimatorConfig& cfg = {}) {
    RewardAssignment rewards = to_rewards(dataset, RewardPolicy::Merged);
    if (setting == CorrelationSetting::WithoutRewards) {
        for (const auto& [id, score] : journalist_scores) rewards.set(id, 0);
    }

    const auto scores = estimate(strategy, g, rewards.densify(g), cfg);

    CorrelationResult result;
    result.strategy = to_string(strategy);
    result.setting = to_string(setting);
    std::vector<double> human, estimated;
    for (const auto& [id, score] : journalist_scores) {
        if (auto node = g.find(id)) {
            human.push_back(score);
            estimated.push_back(scores.rho[*node]);
        } else {
            result.excluded.push_back(id.str());
        }
    }
    if (human.empty())
        throw std::invalid_argument("correlate: no scored domain is present in the graph");
    if (human.size() < 3)
        throw std::invalid_argument("correlate: need at least 3 scored domains in the graph");

    const auto p = pearson(estimated, human);
    const auto s = spearman(estimated, human);
    result.pcc = p.coefficient;
    result.pcc_p = p.p_value;
    result.srcc = s.coefficient;
    result.srcc_p = s.p_value;
    result.sample_size = human.size();
    return result;
}

/// Two-sided paired t-test over per-fold macro-F1 of two reports. The
/// reports must come from identical folds (same k and seed), so the fold
/// scores pair up.
inline double compare_reports(const EvalReport& a, const EvalReport& b) {
    if (a.k != b.k || a.seed != b.seed || a.folds.size() != b.folds.size())
        throw std::invalid_argument("compare_reports: reports use different folds");
    std::vector<double> fa, fb;
    fa.reserve(a.folds.size());
    fb.reserve(b.folds.size());
    for (const auto& f : a.folds) fa.push_back(f.macro.f1);
    for (const auto& f : b.folds) fb.push_back(f.macro.f1);
    return paired_ttest(fa, fb);
}

/// Agreement voting: reliable only when both predictors say reliable.
inline std::map<SourceId, ReliabilityLabel>
ensemble_vote(const std::map<SourceId, ReliabilityLabel>& a,
              const std::map<SourceId, ReliabilityLabel>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("ensemble_vote: key sets differ in size");
    std::map<SourceId, ReliabilityLabel> out;
    auto ai = a.begin();
    auto bi = b.begin();
    for (; ai != a.end(); ++ai, ++bi) {
        if (ai->first != bi->first)
            throw std::invalid_argument("ensemble_vote: key sets differ");
        const bool both = ai->second == ReliabilityLabel::Reliable
                          && bi->second == ReliabilityLabel::Reliable;
        out.emplace(ai->first,
                    both ? ReliabilityLabel::Reliable : ReliabilityLabel::Unreliable);
    }
    return out;
}

// ---- JSON serialization ----------------------------------------------

inline void to_json(nlohmann::json& j, const EstimatorConfig& c) {
    j = nlohmann::json{{"gamma", c.gamma}, {"n", c.hops}, {"tol", c.tol},
                       {"max_iter", c.max_iter}};
    if (c.gamma_fp) j["gamma_fp"] = *c.gamma_fp;
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
    j = nlohmann::json{{"strategy", r.strategy},
                       {"config", r.config},
                       {"k", r.k},
                       {"seed", r.seed},
                       {"expset", r.expset},
                       {"folds", r.folds},
                       {"mean", r.mean},
                       {"std", r.stddev},
                       {"ci95", r.ci95},
                       {"leak_check_passed", r.leak_check_passed}};
    if (!r.ensemble_with.empty()) j["ensemble_with"] = r.ensemble_with;
}

inline void to_json(nlohmann::json& j, const GridPoint& p) {
    j = nlohmann::json{{"value", p.value},
                       {"mean_macro_f1", p.mean_macro_f1},
                       {"std_macro_f1", p.std_macro_f1},
                       {"ci95_half_width", p.ci95_half_width}};
}

inline void to_json(nlohmann::json& j, const GridSearchResult& r) {
    j = nlohmann::json{{"strategy", r.strategy},
                       {"hyperparameter", r.hyperparameter},
                       {"points", r.points},
                       {"selected", r.selected},
                       {"selection_rule", r.selection_rule}};
}

inline void to_json(nlohmann::json& j, const CorrelationResult& r) {
    j = nlohmann::json{{"strategy", r.strategy},
                       {"setting", r.setting},
                       {"pcc", r.pcc},
                       {"pcc_p_value", r.pcc_p},
                       {"srcc", r.srcc},
                       {"srcc_p_value", r.srcc_p},
                       {"sample_size", r.sample_size},
                       {"excluded", r.excluded}};
}

} // namespace relnet
