// relnet: estimate and evaluate news-source reliability degrees over a
// hyperlink graph. Subcommands cover the whole pipeline: graph
// construction from article records, snapshot merging, degree estimation,
// cross-validated evaluation, hyperparameter sweeps, correlation against
// journalist scores, and score-file ranking.
//
// Conventions: data goes to --out files (or stdout), logs go to stderr,
// and every failure prints a machine-readable JSON object on stderr with a
// nonzero exit code. Re-running a command on identical inputs produces
// byte-identical outputs.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relnet/eval.hpp"
#include "relnet/graph_io.hpp"
#include "relnet/ingest.hpp"
#include "relnet/labels.hpp"
#include "relnet/scores_io.hpp"

namespace {

constexpr const char* kVersion = "relnet 1.0.0";

using namespace relnet;

/// Hyperparameters selected by grid search on each experiment set; used as
/// defaults whenever the user does not pass --gamma / --n explicitly.
double default_gamma(Strategy s, ExpsetMode e) {
    switch (s) {
        case Strategy::F:
            return e == ExpsetMode::B ? 0.5 : 0.05;
        case Strategy::P:
            return e == ExpsetMode::A ? 0.15 : (e == ExpsetMode::B ? 0.3 : 0.2);
        case Strategy::FP:
            return e == ExpsetMode::A ? 0.1 : 0.05;
        case Strategy::AvgPFp:
            return default_gamma(Strategy::P, e);
        default:
            return 0.3;
    }
}

double default_gamma_fp(ExpsetMode e) { return default_gamma(Strategy::FP, e); }

int default_hops(ExpsetMode e) { return e == ExpsetMode::BMinus ? 2 : 1; }

struct CommonOptions {
    std::string graph_path;
    std::string labels_path;
    std::string strategy_name = "p";
    std::optional<double> gamma;
    std::optional<double> gamma_fp;
    std::optional<int> hops;
    double tol = 1e-8;
    int max_iter = 10'000;
    unsigned threads = 1;
    bool keep_self_links = false;
    std::string expset_name = "b";
};

Strategy parse_strategy_or_fail(const std::string& name) {
    auto s = parse_strategy(name);
    if (!s) throw ConfigError("unknown strategy \"" + name + "\"");
    return *s;
}

ExpsetMode parse_expset_or_fail(const std::string& name) {
    auto m = parse_expset(name);
    if (!m) throw ConfigError("unknown expset \"" + name + "\" (use a, b or b-minus)");
    return *m;
}

EstimatorConfig make_config(const CommonOptions& opt, Strategy strategy, ExpsetMode expset) {
    EstimatorConfig cfg;
    cfg.gamma = opt.gamma.value_or(default_gamma(strategy, expset));
    cfg.hops = opt.hops.value_or(default_hops(expset));
    cfg.tol = opt.tol;
    cfg.max_iter = opt.max_iter;
    cfg.threads = opt.threads;
    if (strategy == Strategy::AvgPFp)
        cfg.gamma_fp = opt.gamma_fp.value_or(default_gamma_fp(expset));
    else if (opt.gamma_fp)
        cfg.gamma_fp = opt.gamma_fp;
    cfg.check();
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw ParseError("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

void log_expset(const Expset& e) {
    std::cerr << "expset " << e.dataset.name << ": " << e.reliable << " reliable / "
              << e.unreliable << " unreliable";
    if (e.dropped_mixed > 0) std::cerr << " (" << e.dropped_mixed << " mixed dropped)";
    if (e.out_of_graph > 0) std::cerr << ", " << e.out_of_graph << " labeled domains not in graph";
    std::cerr << "\n";
}

// ---- subcommands -------------------------------------------------------

int cmd_build_graph(const std::vector<std::string>& inputs, const std::string& out,
                    const std::string& stats_out, const std::string& weights_out,
                    bool keep_self_links) {
    IngestConfig cfg;
    cfg.allow_self_links = keep_self_links;
    auto [graph, stats] = build_graph_files(inputs, cfg);

    nlohmann::json jstats = stats;
    jstats["nodes"] = graph.node_count();
    jstats["edges"] = graph.edge_count();

    save_edges(graph, out);
    if (!weights_out.empty()) save_weights(graph, weights_out);
    if (stats_out.empty())
        std::cerr << jstats.dump(2) << "\n";
    else
        write_json(stats_out, jstats);
    std::cerr << "graph: " << graph.node_count() << " nodes, " << graph.edge_count()
              << " edges -> " << out << "\n";
    return 0;
}

int cmd_merge_graphs(const std::vector<std::string>& inputs, const std::string& out,
                     bool keep_self_links) {
    std::vector<SourceGraph> graphs;
    graphs.reserve(inputs.size());
    for (const auto& path : inputs) graphs.push_back(load_edges(path, keep_self_links));
    auto merged = merge(graphs);
    save_edges(merged, out);
    std::cerr << "merged " << inputs.size() << " graphs: " << merged.node_count() << " nodes, "
              << merged.edge_count() << " edges -> " << out << "\n";
    return 0;
}

int cmd_estimate(const CommonOptions& opt, const std::string& reward_policy,
                 const std::string& out, const std::string& meta_out) {
    const Strategy strategy = parse_strategy_or_fail(opt.strategy_name);
    const ExpsetMode expset = parse_expset_or_fail(opt.expset_name);
    const auto cfg = make_config(opt, strategy, expset);

    auto graph = load_edges(opt.graph_path, opt.keep_self_links);

    RewardAssignment rewards;
    if (!opt.labels_path.empty()) {
        auto labels = load_labels(opt.labels_path);
        RewardPolicy policy;
        if (reward_policy == "strict")
            policy = RewardPolicy::Strict;
        else if (reward_policy == "merged")
            policy = RewardPolicy::Merged;
        else
            throw ConfigError("unknown reward policy \"" + reward_policy + "\"");
        rewards = to_rewards(labels, policy);
    } else if (strategy != Strategy::PageRank) {
        throw ConfigError("--labels is required for reward-based strategies");
    }

    auto scores = estimate(strategy, graph, rewards.densify(graph), cfg);
    if (out.empty() || out == "-")
        save_scores(graph, scores, std::cout);
    else
        save_scores(graph, scores, out);

    nlohmann::json meta{{"strategy", scores.meta.strategy},
                        {"config", scores.meta.config},
                        {"iterations", scores.meta.iterations},
                        {"residual", scores.meta.residual},
                        {"nodes", graph.node_count()}};
    if (meta_out.empty())
        std::cerr << meta.dump(2) << "\n";
    else
        write_json(meta_out, meta);
    return 0;
}

int cmd_evaluate(const CommonOptions& opt, int k, std::uint64_t seed,
                 const std::string& ensemble_path, const std::string& out) {
    const Strategy strategy = parse_strategy_or_fail(opt.strategy_name);
    const ExpsetMode expset_mode = parse_expset_or_fail(opt.expset_name);
    const auto cfg = make_config(opt, strategy, expset_mode);

    auto graph = load_edges(opt.graph_path, opt.keep_self_links);
    auto labels = load_labels(opt.labels_path);
    auto expset = build_expset(labels, graph, expset_mode);
    log_expset(expset);

    EnsembleInput ensemble;
    const EnsembleInput* ensemble_ptr = nullptr;
    if (!ensemble_path.empty()) {
        ensemble.predictions = load_predictions_csv(ensemble_path);
        ensemble.source = ensemble_path;
        ensemble_ptr = &ensemble;
    }

    auto report = cross_validate(strategy, graph, expset.dataset, cfg, k, seed, ensemble_ptr);
    report.expset = to_string(expset_mode);
    write_json(out, report);
    std::cerr << "macro-F1 " << report.mean.macro.f1 << " +- " << report.stddev.macro.f1
              << ", accuracy " << report.mean.accuracy << "\n";
    return 0;
}

std::vector<double> parse_grid(const std::string& spec, Strategy strategy) {
    if (spec.empty() || spec == "default") return default_grid(strategy);
    std::vector<double> grid;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        auto comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        const auto token = spec.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("bad grid value \"" + token + "\"");
        }
        pos = comma + 1;
    }
    return grid;
}

int cmd_grid_search(const CommonOptions& opt, const std::string& grid_spec, int k,
                    std::uint64_t seed, unsigned jobs, const std::string& out,
                    const std::string& sweep_out) {
    const Strategy strategy = parse_strategy_or_fail(opt.strategy_name);
    if (strategy == Strategy::PageRank || strategy == Strategy::AvgPFp)
        throw ConfigError("grid search supports the f, p, fp and i strategies");
    const ExpsetMode expset_mode = parse_expset_or_fail(opt.expset_name);
    const auto cfg = make_config(opt, strategy, expset_mode);

    auto graph = load_edges(opt.graph_path, opt.keep_self_links);
    auto labels = load_labels(opt.labels_path);
    auto expset = build_expset(labels, graph, expset_mode);
    log_expset(expset);

    auto result = grid_search(strategy, graph, expset.dataset, parse_grid(grid_spec, strategy),
                              cfg, k, seed, jobs);
    write_json(out, result);

    if (!sweep_out.empty()) {
        std::string csv = "hyperparameter,value,mean_macro_f1,std_macro_f1,ci95_half_width\n";
        for (const auto& p : result.points) {
            csv += result.hyperparameter;
            csv += ',';
            csv += detail::format_double(p.value);
            csv += ',';
            csv += detail::format_double(p.mean_macro_f1);
            csv += ',';
            csv += detail::format_double(p.std_macro_f1);
            csv += ',';
            csv += detail::format_double(p.ci95_half_width);
            csv += '\n';
        }
        write_text(sweep_out, csv);
    }
    std::cerr << "selected " << result.hyperparameter << " = " << result.selected << "\n";
    return 0;
}

int cmd_correlate(const CommonOptions& opt, const std::string& scores_path,
                  const std::string& setting_name, const std::string& out) {
    const Strategy strategy = parse_strategy_or_fail(opt.strategy_name);
    const ExpsetMode expset_mode = parse_expset_or_fail(opt.expset_name);
    const auto cfg = make_config(opt, strategy, expset_mode);

    CorrelationSetting setting;
    if (setting_name == "with" || setting_name == "with-rewards")
        setting = CorrelationSetting::WithRewards;
    else if (setting_name == "without" || setting_name == "without-rewards")
        setting = CorrelationSetting::WithoutRewards;
    else
        throw ConfigError("unknown setting \"" + setting_name + "\" (use with or without)");

    auto graph = load_edges(opt.graph_path, opt.keep_self_links);
    auto labels = load_labels(opt.labels_path);
    auto expset = build_expset(labels, graph, expset_mode);
    log_expset(expset);
    auto journalist = load_scores_csv(scores_path);

    auto result = correlate(strategy, graph, expset.dataset, journalist, setting, cfg);
    for (const auto& d : result.excluded)
        std::cerr << "warning: scored domain not in graph, excluded: " << d << "\n";
    write_json(out, result);
    std::cerr << "pcc " << result.pcc << " (p " << result.pcc_p << "), srcc " << result.srcc
              << " (p " << result.srcc_p << ") over " << result.sample_size << " domains\n";
    return 0;
}

int cmd_rank(const std::string& scores_path, int top, int bottom,
             const std::vector<std::string>& queries) {
    auto rows = load_scores_tsv(scores_path); // already sorted by rho descending

    if (!queries.empty()) {
        std::map<std::string, const ScoreRow*> index;
        for (const auto& r : rows) index.emplace(r.domain, &r);
        for (const auto& q : queries) {
            const auto id = SourceId::canonical(q);
            auto it = index.find(id.str());
            if (it == index.end()) {
                // out-of-graph source: degree 0, reliability indeterminate
                std::cout << id.str() << "\t0\t0\tunreliable\tindeterminate\n";
            } else {
                std::cout << id.str() << '\t' << detail::format_double(it->second->rho) << '\t'
                          << detail::format_double(it->second->rho_normalized) << '\t'
                          << (it->second->rho > 0 ? "reliable" : "unreliable") << "\t-\n";
            }
        }
        return 0;
    }

    const auto n = rows.size();
    std::cout << "rank\tdomain\trho\trho_normalized\n";
    const int t = std::min<std::size_t>(top, n);
    for (int i = 0; i < t; ++i)
        std::cout << (i + 1) << '\t' << rows[i].domain << '\t'
                  << detail::format_double(rows[i].rho) << '\t'
                  << detail::format_double(rows[i].rho_normalized) << '\n';
    if (bottom > 0 && n > 0) {
        std::cout << "...\n";
        const int b = std::min<std::size_t>(bottom, n);
        for (int i = b; i-- > 0;) {
            const auto& row = rows[n - 1 - i];
            std::cout << (i + 1) << '\t' << row.domain << '\t' << detail::format_double(row.rho)
                      << '\t' << detail::format_double(row.rho_normalized) << '\n';
        }
    }
    return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_labels = true) {
    cmd->add_option("--graph", opt.graph_path, "edge-list TSV")->required();
    if (with_labels) cmd->add_option("--labels", opt.labels_path, "label CSV");
    cmd->add_option("--strategy", opt.strategy_name, "f | p | fp | i | avg-p-fp | pagerank");
    cmd->add_option("--gamma", opt.gamma, "discount factor in [0, 1)");
    cmd->add_option("--gamma-fp", opt.gamma_fp, "discount for the fp side of avg-p-fp");
    cmd->add_option("--n", opt.hops, "invest/collect rounds");
    cmd->add_option("--tol", opt.tol, "convergence threshold");
    cmd->add_option("--max-iter", opt.max_iter, "iteration cap");
    cmd->add_option("--threads", opt.threads, "worker threads (result is thread-count independent)");
    cmd->add_flag("--keep-self-links", opt.keep_self_links, "retain intra-domain links");
    cmd->add_option("--expset", opt.expset_name,
                    "a | b | b-minus; selects published hyperparameter defaults and the "
                    "mixed-label handling");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"news-source reliability degrees from hyperlink structure"};
    app.set_version_flag("--version", kVersion);
    // config sections are named after the subcommand, e.g. [estimate];
    // explicit flags take precedence over config values
    app.set_config("--config", "", "optional config file (INI, one section per subcommand)");
    app.require_subcommand(1);

    int exit_code = 0;
    auto run = [&exit_code](auto&& fn) {
        try {
            exit_code = fn();
        } catch (const std::exception& e) {
            const char* type = "internal";
            if (dynamic_cast<const ConfigError*>(&e)) type = "config";
            else if (dynamic_cast<const ParseError*>(&e)) type = "parse";
            else if (dynamic_cast<const ConvergenceError*>(&e)) type = "convergence";
            else if (dynamic_cast<const std::invalid_argument*>(&e)) type = "config";
            nlohmann::json err{{"error", {{"type", type}, {"message", e.what()}}}};
            std::cerr << err.dump() << "\n";
            exit_code = 1;
        }
    };

    // build-graph
    std::vector<std::string> bg_inputs;
    std::string bg_out, bg_stats, bg_weights;
    bool bg_self = false;
    auto* bg = app.add_subcommand("build-graph", "build a graph from JSONL article records");
    bg->add_option("inputs", bg_inputs, "article JSONL files")->required();
    bg->add_option("--out", bg_out, "edge-list TSV output")->required();
    bg->add_option("--stats-out", bg_stats, "ingest stats JSON (stderr when omitted)");
    bg->add_option("--weights-out", bg_weights, "normalized weights TSV");
    bg->add_flag("--keep-self-links", bg_self, "retain intra-domain links");
    bg->callback([&] {
        run([&] { return cmd_build_graph(bg_inputs, bg_out, bg_stats, bg_weights, bg_self); });
    });

    // merge-graphs
    std::vector<std::string> mg_inputs;
    std::string mg_out;
    bool mg_self = false;
    auto* mg = app.add_subcommand("merge-graphs", "sum edge counts across snapshot graphs");
    mg->add_option("inputs", mg_inputs, "edge-list TSV files")->required()->expected(-1);
    mg->add_option("--out", mg_out, "merged edge-list TSV")->required();
    mg->add_flag("--keep-self-links", mg_self, "graphs were built with self-links retained");
    mg->callback([&] { run([&] { return cmd_merge_graphs(mg_inputs, mg_out, mg_self); }); });

    // estimate
    CommonOptions est_opt;
    std::string est_policy = "merged", est_out, est_meta;
    auto* est = app.add_subcommand("estimate", "score every source in the graph");
    add_common_flags(est, est_opt);
    est->add_option("--reward-policy", est_policy, "strict (mixed->0) | merged (mixed->-1)");
    est->add_option("--out", est_out, "scores TSV (stdout when omitted)");
    est->add_option("--meta-out", est_meta, "run metadata JSON (stderr when omitted)");
    est->callback([&] { run([&] { return cmd_estimate(est_opt, est_policy, est_out, est_meta); }); });

    // evaluate
    CommonOptions ev_opt;
    int ev_k = 5;
    std::uint64_t ev_seed = 42;
    std::string ev_ensemble, ev_out;
    auto* ev = app.add_subcommand("evaluate", "k-fold cross-validated classification metrics");
    add_common_flags(ev, ev_opt);
    ev->get_option("--labels")->required();
    ev->add_option("--k", ev_k, "folds");
    ev->add_option("--seed", ev_seed, "fold shuffle seed");
    ev->add_option("--ensemble", ev_ensemble, "external predictions CSV for agreement voting");
    ev->add_option("--out", ev_out, "report JSON (stdout when omitted)");
    ev->callback([&] { run([&] { return cmd_evaluate(ev_opt, ev_k, ev_seed, ev_ensemble, ev_out); }); });

    // grid-search
    CommonOptions gs_opt;
    int gs_k = 5;
    std::uint64_t gs_seed = 42;
    unsigned gs_jobs = 1;
    std::string gs_grid = "default", gs_out, gs_sweep;
    auto* gs = app.add_subcommand("grid-search", "sweep gamma or n by cross-validation");
    add_common_flags(gs, gs_opt);
    gs->get_option("--labels")->required();
    gs->add_option("--grid", gs_grid, "\"default\" or comma-separated values");
    gs->add_option("--k", gs_k, "folds");
    gs->add_option("--seed", gs_seed, "fold shuffle seed");
    gs->add_option("--jobs", gs_jobs, "parallel grid points");
    gs->add_option("--out", gs_out, "result JSON (stdout when omitted)");
    gs->add_option("--sweep-out", gs_sweep, "per-point sweep CSV");
    gs->callback([&] {
        run([&] { return cmd_grid_search(gs_opt, gs_grid, gs_k, gs_seed, gs_jobs, gs_out, gs_sweep); });
    });

    // correlate
    CommonOptions co_opt;
    std::string co_scores, co_setting = "with", co_out;
    auto* co = app.add_subcommand("correlate",
                                  "correlate estimated degrees with journalist scores");
    add_common_flags(co, co_opt);
    co->get_option("--labels")->required();
    co->add_option("--scores", co_scores, "journalist score CSV (domain,score)")->required();
    co->add_option("--setting", co_setting, "with | without (rewards on scored domains)");
    co->add_option("--out", co_out, "result JSON (stdout when omitted)");
    co->callback([&] { run([&] { return cmd_correlate(co_opt, co_scores, co_setting, co_out); }); });

    // rank
    std::string rk_scores;
    int rk_top = 5, rk_bottom = 5;
    std::vector<std::string> rk_queries;
    auto* rk = app.add_subcommand("rank", "show the best and worst scored sources");
    rk->add_option("--scores", rk_scores, "scores TSV from estimate")->required();
    rk->add_option("--top", rk_top, "rows from the top");
    rk->add_option("--bottom", rk_bottom, "rows from the bottom");
    rk->add_option("--query", rk_queries, "look up specific domains instead");
    rk->callback([&] { run([&] { return cmd_rank(rk_scores, rk_top, rk_bottom, rk_queries); }); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        nlohmann::json err{{"error", {{"type", "cli"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return exit_code;
}
