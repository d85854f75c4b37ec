#include "dynsvd/cli_app.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "dynsvd/config.hpp"
#include "dynsvd/experiments.hpp"
#include "dynsvd/report.hpp"
#include "dynsvd/rng.hpp"

namespace dynsvd {

namespace {

struct BenchOptions {
    std::vector<std::string> policies{"margin", "lwi2", "fixed-edges", "fixed-slices"};
    std::vector<std::uint64_t> seeds;
    int fixed_restarts = -1;
    double fixed_max_error = -1.0;
    bool link_pred = false;
    double hide_fraction = 0.1;
    int lp_runs = 10;
    std::string hide_mode = "per-slice";
    bool tracking = false;
    bool scalability = false;
    int scale_steps = 4;
    std::string out_csv = "bench.csv";
    std::string out_json = "bench.json";
};

void add_stream_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--input", cfg.input, "edge-list file (u v [w] [ts]; # comments)");
    cmd->add_option("--model", cfg.model, "synthetic model: random|celebrity|community");
    cmd->add_option("--n", cfg.n, "synthetic node count");
    cmd->add_option("--m-static", cfg.m_static, "synthetic static edge count");
    cmd->add_option("--m-evolve", cfg.m_evolve, "synthetic evolving edge count");
    cmd->add_option("--trigger-slice", cfg.trigger_slice, "injection slice (celebrity/community)");
    cmd->add_option("--celebrity-node", cfg.celebrity_node, "celebrity node id (-1: sampled)");
    cmd->add_option("--attach-fraction", cfg.attach_fraction, "celebrity attach fraction");
    cmd->add_option("--node-fraction", cfg.node_fraction, "community node fraction");
    cmd->add_option("--communities", cfg.communities, "community count");
    cmd->add_option("--intra-prob", cfg.intra_prob, "intra-community edge probability");
    cmd->add_option("--static-fraction", cfg.static_fraction,
                    "share of file events forming the static matrix");
    cmd->add_option("--T", cfg.T, "number of time slices");
    cmd->add_option("--slicing", cfg.slicing, "equal-edges|equal-time");
    cmd->add_option("--k", cfg.k, "target rank (capped at n/2)");
    cmd->add_option("--similarity", cfg.similarity, "identity|normalized");
    cmd->add_option("--updater", cfg.updater, "hold|first-order");
    cmd->add_option("--gap-floor", cfg.gap_floor, "first-order eigen-gap floor");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--eig-tol", cfg.eig_tol, "eigensolver residual tolerance");
    cmd->add_flag("--timings", cfg.timings,
                  "write real wall-clock fields (artifacts stop being byte-reproducible)");
}

void add_policy_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--policy", cfg.policy, "margin|lwi2|fixed-edges|fixed-slices");
    cmd->add_option("--theta", cfg.theta, "margin policy threshold");
    cmd->add_option("--loss-threshold", cfg.loss_threshold, "lwi2 loss threshold");
    cmd->add_option("--lwi2-mode", cfg.lwi2_mode, "absolute|relative");
    cmd->add_option("--edges-per-restart", cfg.edges_per_restart, "fixed-edges budget");
    cmd->add_option("--slices-per-restart", cfg.slices_per_restart, "fixed-slices budget");
}

ExperimentSetup make_experiment_setup(const RunConfig& cfg, LoadedStream&& ls) {
    ExperimentSetup setup;
    setup.a0 = std::move(ls.a0);
    setup.stream = std::move(ls.stream);
    setup.sim = cfg.make_similarity();
    setup.k = cfg.effective_k(setup.a0.dim());
    setup.updater = cfg.make_updater();
    setup.eig.tol = cfg.eig_tol;
    setup.eig.seed = cfg.seed;
    return setup;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int do_run(RunConfig cfg) {
    cfg.validate_config();
    LoadedStream ls = load_stream(cfg);
    print_warnings(ls.warnings);
    ExperimentSetup setup = make_experiment_setup(cfg, std::move(ls));

    std::vector<double> oracle;
    if (cfg.oracle) oracle = oracle_min_loss_per_slice(setup);

    RunOptions opts;
    opts.eig = setup.eig;
    opts.keep_factors = false;
    RunResult r = run(setup.a0, setup.stream, setup.sim, setup.k, cfg.make_policy(),
                      setup.updater, opts);

    const std::vector<double>* oracle_ptr = cfg.oracle ? &oracle : nullptr;
    if (!cfg.out_csv.empty()) write_run_csv(cfg.out_csv, cfg, r.record, oracle_ptr);
    if (!cfg.out_json.empty()) write_run_json(cfg.out_json, cfg, r.record, oracle_ptr);
    std::cout << "slices=" << r.record.slices.size() << " restarts=" << r.record.restart_count
              << " k=" << setup.k << "\n";
    if (!cfg.out_csv.empty()) std::cout << "wrote " << cfg.out_csv << "\n";
    if (!cfg.out_json.empty()) std::cout << "wrote " << cfg.out_json << "\n";
    return 0;
}

int do_gen(RunConfig cfg, const std::string& out_path) {
    if (cfg.model.empty()) throw std::invalid_argument("gen requires --model");
    cfg.input.clear();
    cfg.validate_config();
    Synthetic g = generate(cfg.make_synthetic(), cfg.T);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << "# generated by " << kToolName << " " << kToolVersion << "\n";
    out << "# config: " << cfg.to_json_string() << "\n";
    out << "# columns: u v w ts  (ts 0 = static part; ts >= 1 = slice index)\n";
    for (const EdgeEvent& e : g.events) {
        out << e.u << ' ' << e.v << ' ' << format_double(e.w) << ' ' << format_double(e.ts)
            << '\n';
    }
    std::cout << "wrote " << out_path << " (" << g.events.size() << " events, n=" << cfg.n
              << ")\n";
    return 0;
}

int do_profile(RunConfig cfg, int max_interval, const std::string& out_csv,
               const std::string& out_json) {
    cfg.validate_config();
    if (max_interval < 1) throw std::invalid_argument("profile: --max-interval must be >= 1");
    LoadedStream ls = load_stream(cfg);
    print_warnings(ls.warnings);
    ExperimentSetup setup = make_experiment_setup(cfg, std::move(ls));
    std::vector<int> intervals;
    for (int i = 1; i <= max_interval; ++i) intervals.push_back(i);
    auto points = error_accumulation_profile(setup, intervals);
    write_profile_csv(out_csv, cfg.to_json_string(), points);
    if (!out_json.empty()) {
        std::vector<BenchRow> rows;
        for (const auto& p : points) {
            rows.push_back(BenchRow{"profile", "", "", cfg.seed,
                                    "mean_r@" + std::to_string(p.interval), p.mean_r, ""});
            rows.push_back(BenchRow{"profile", "", "", cfg.seed,
                                    "std_r@" + std::to_string(p.interval), p.std_r, ""});
        }
        write_bench_json(out_json, cfg.to_json_string(), rows);
    }
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

std::vector<RestartPolicy> parse_policies(const RunConfig& cfg,
                                          const std::vector<std::string>& names) {
    std::vector<RestartPolicy> out;
    for (const std::string& name : names) {
        RunConfig c = cfg;
        c.policy = name;
        out.push_back(c.make_policy());
    }
    return out;
}

// One bench cell: everything evaluated for a single seed.
std::vector<BenchRow> bench_cell(const RunConfig& base, const BenchOptions& opt,
                                 std::uint64_t seed) {
    RunConfig cfg = base;
    cfg.seed = seed;
    std::vector<BenchRow> rows;
    const std::string dataset = cfg.model.empty() ? cfg.input : cfg.model;
    auto fail_row = [&](const std::string& where, const std::string& what) {
        rows.push_back(BenchRow{dataset, where, "", seed, "failed", 1.0, what});
    };

    LoadedStream ls = load_stream(cfg);
    ExperimentSetup setup = make_experiment_setup(cfg, std::move(ls));
    std::vector<RestartPolicy> policies = parse_policies(cfg, opt.policies);

    std::vector<double> oracle;
    const bool need_oracle = opt.fixed_restarts >= 0 || opt.fixed_max_error >= 0.0;
    if (need_oracle) oracle = oracle_min_loss_per_slice(setup);

    auto emit_outcome = [&](const PolicyOutcome& o, const std::string& suffix) {
        rows.push_back(BenchRow{dataset, o.policy, o.params, seed, "restarts" + suffix,
                                static_cast<double>(o.restarts), ""});
        rows.push_back(BenchRow{dataset, o.policy, o.params, seed, "max_r" + suffix,
                                o.errors.max_r, ""});
        rows.push_back(BenchRow{dataset, o.policy, o.params, seed, "avg_r" + suffix,
                                o.errors.avg_r, ""});
        rows.push_back(BenchRow{dataset, o.policy, o.params, seed, "exact" + suffix,
                                o.exact ? 1.0 : 0.0, ""});
        rows.push_back(BenchRow{dataset, o.policy, o.params, seed, "monitor_seconds" + suffix,
                                base.timings ? o.monitor_seconds : 0.0, ""});
        rows.push_back(BenchRow{dataset, o.policy, o.params, seed, "restart_seconds" + suffix,
                                base.timings ? o.restart_seconds : 0.0, ""});
    };

    if (opt.fixed_restarts >= 0) {
        try {
            auto outcomes = sweep_fixed_restarts(setup, policies, opt.fixed_restarts, &oracle);
            for (const auto& o : outcomes) emit_outcome(o, "");
        } catch (const std::exception& e) {
            fail_row("fixed-restarts", e.what());
        }
    }
    if (opt.fixed_max_error >= 0.0) {
        try {
            auto outcomes = sweep_fixed_max_error(setup, policies, opt.fixed_max_error, oracle);
            for (const auto& o : outcomes) emit_outcome(o, "@fixed_max_error");
        } catch (const std::exception& e) {
            fail_row("fixed-max-error", e.what());
        }
    }
    if (opt.link_pred) {
        try {
            std::vector<std::uint64_t> sub_seeds;
            CounterRng rng(seed);
            for (int i = 0; i < opt.lp_runs; ++i) {
                sub_seeds.push_back(rng.fork_seed(static_cast<std::uint64_t>(i)));
            }
            const HideMode mode = opt.hide_mode == "once-global" ? HideMode::OnceGlobal
                                                                 : HideMode::PerSlice;
            const int target = opt.fixed_restarts >= 0 ? opt.fixed_restarts : 4;
            auto res =
                link_prediction(setup, policies, target, opt.hide_fraction, sub_seeds, mode);
            for (const auto& r : res) {
                rows.push_back(
                    BenchRow{dataset, r.policy, "", seed, "link_rel_mse", r.relative_mse, ""});
            }
        } catch (const std::exception& e) {
            fail_row("link-prediction", e.what());
        }
    }
    if (opt.tracking) {
        try {
            ExperimentSetup tsetup = setup;
            if (!updater_changes_factors(tsetup.updater)) {
                tsetup.updater = FirstOrderUpdater{cfg.gap_floor};
            }
            const int target = opt.fixed_restarts >= 0 ? opt.fixed_restarts : 4;
            auto res = eigen_tracking(tsetup, policies, target);
            for (const auto& r : res) {
                rows.push_back(BenchRow{dataset, r.policy, "", seed, "tracking_rmse", r.rmse,
                                        ""});
                rows.push_back(BenchRow{dataset, r.policy, "", seed, "tracking_restarts",
                                        static_cast<double>(r.restarts), ""});
            }
        } catch (const std::exception& e) {
            fail_row("eigen-tracking", e.what());
        }
    }
    return rows;
}

int do_bench(RunConfig cfg, BenchOptions opt) {
    if (opt.fixed_restarts < 0 && opt.fixed_max_error < 0.0 && !opt.link_pred &&
        !opt.tracking && !opt.scalability) {
        throw std::invalid_argument(
            "bench needs at least one mode: --fixed-restarts, --fixed-max-error, "
            "--link-prediction, --eigen-tracking or --scalability");
    }
    cfg.validate_config();
    if (opt.seeds.empty()) opt.seeds.push_back(cfg.seed);

    int threads = 1;
    if (const char* env = std::getenv("DYNSVD_THREADS")) {
        threads = std::max(1, std::atoi(env));
    }

    std::vector<std::vector<BenchRow>> cell_rows(opt.seeds.size());
    std::vector<std::string> cell_errors(opt.seeds.size());
    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= opt.seeds.size()) return;
            try {
                cell_rows[i] = bench_cell(cfg, opt, opt.seeds[i]);
            } catch (const std::exception& e) {
                cell_errors[i] = e.what();
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            std::cout << "seed " << opt.seeds[i] << " done\n";
        }
    };
    if (threads == 1 || opt.seeds.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<BenchRow> rows;
    const std::string dataset = cfg.model.empty() ? cfg.input : cfg.model;
    for (std::size_t i = 0; i < opt.seeds.size(); ++i) {
        if (!cell_errors[i].empty()) {
            rows.push_back(
                BenchRow{dataset, "", "", opt.seeds[i], "failed", 1.0, cell_errors[i]});
        }
        rows.insert(rows.end(), cell_rows[i].begin(), cell_rows[i].end());
    }

    if (opt.scalability) {
        if (cfg.model != "random") {
            throw std::invalid_argument("--scalability requires --model random");
        }
        auto pts = scalability_probe(RandomSpec{cfg.n, cfg.m_static, cfg.m_evolve},
                                     opt.scale_steps, cfg.T, cfg.effective_k(cfg.n), cfg.seed,
                                     cfg.theta);
        for (const auto& p : pts) {
            const std::string params = "n=" + std::to_string(p.n);
            auto push = [&](const std::string& metric, double v) {
                rows.push_back(BenchRow{"scalability", "margin", params, cfg.seed, metric, v, ""});
            };
            push("nodes", p.n);
            push("edges", static_cast<double>(p.edges));
            push("monitor_seconds", cfg.timings ? p.monitor_seconds : 0.0);
            push("restart_seconds", cfg.timings ? p.restart_seconds : 0.0);
            push("row_touches", static_cast<double>(p.row_touches));
            push("entry_visits", static_cast<double>(p.entry_visits));
            push("m_s_total", static_cast<double>(p.m_s_total));
            push("support_total", static_cast<double>(p.support_total));
        }
    }

    write_bench_csv(opt.out_csv, cfg.to_json_string(), rows);
    write_bench_json(opt.out_json, cfg.to_json_string(), rows);
    std::cout << "wrote " << opt.out_csv << " and " << opt.out_json << " (" << rows.size()
              << " rows)\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"error-bounded restart of truncated spectral factors on dynamic networks"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file; keys match the long flag names, grouped in a "
                   "[run]/[gen]/[bench]/[profile] section; give it before the subcommand");

    RunConfig run_cfg;
    CLI::App* run_cmd =
        app.add_subcommand("run", "run one policy over a stream; write the per-slice log");
    add_stream_flags(run_cmd, run_cfg);
    add_policy_flags(run_cmd, run_cfg);
    run_cfg.out_csv = "run.csv";
    run_cfg.out_json = "run.json";
    run_cmd->add_option("--out-csv", run_cfg.out_csv, "per-slice CSV path ('' disables)");
    run_cmd->add_option("--out-json", run_cfg.out_json, "run JSON path ('' disables)");
    run_cmd->add_flag("--oracle", run_cfg.oracle,
                      "add dense-oracle ground-truth columns (desk scale only)");

    RunConfig gen_cfg;
    std::string gen_out = "synthetic.edges";
    CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic edge-list file");
    add_stream_flags(gen_cmd, gen_cfg);
    gen_cmd->add_option("--out", gen_out, "output edge-list path");

    RunConfig bench_cfg;
    BenchOptions bench_opt;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "compare policies: sweeps, link prediction, tracking");
    add_stream_flags(bench_cmd, bench_cfg);
    add_policy_flags(bench_cmd, bench_cfg);
    bench_cmd->add_option("--policies", bench_opt.policies, "policies to compare")
        ->delimiter(',');
    bench_cmd->add_option("--seeds", bench_opt.seeds, "seeds (one cell per seed)")
        ->delimiter(',');
    bench_cmd->add_option("--fixed-restarts", bench_opt.fixed_restarts,
                          "tune every policy to this restart count");
    bench_cmd->add_option("--fixed-max-error", bench_opt.fixed_max_error,
                          "minimize restarts subject to max(r) <= this");
    bench_cmd->add_flag("--link-prediction", bench_opt.link_pred, "hidden-edge recovery mode");
    bench_cmd->add_option("--hide-fraction", bench_opt.hide_fraction, "hidden edge fraction");
    bench_cmd->add_option("--lp-runs", bench_opt.lp_runs, "hiding repetitions per seed");
    bench_cmd->add_option("--hide-mode", bench_opt.hide_mode, "per-slice|once-global");
    bench_cmd->add_flag("--eigen-tracking", bench_opt.tracking, "top-eigenvalue tracking mode");
    bench_cmd->add_flag("--scalability", bench_opt.scalability, "geometric size sweep");
    bench_cmd->add_option("--scale-steps", bench_opt.scale_steps, "doubling steps");
    bench_cmd->add_option("--out-csv", bench_opt.out_csv, "merged report CSV");
    bench_cmd->add_option("--out-json", bench_opt.out_json, "merged report JSON");

    RunConfig prof_cfg;
    int prof_max_interval = 10;
    std::string prof_out_csv = "profile.csv";
    std::string prof_out_json = "profile.json";
    CLI::App* prof_cmd = app.add_subcommand(
        "profile", "error accumulated Delta slices after a restart, swept over start slices");
    add_stream_flags(prof_cmd, prof_cfg);
    prof_cmd->add_option("--max-interval", prof_max_interval, "largest interval Delta");
    prof_cmd->add_option("--out-csv", prof_out_csv, "profile CSV path");
    prof_cmd->add_option("--out-json", prof_out_json, "profile JSON path ('' disables)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return do_run(run_cfg);
        if (gen_cmd->parsed()) return do_gen(gen_cfg, gen_out);
        if (bench_cmd->parsed()) return do_bench(bench_cfg, bench_opt);
        if (prof_cmd->parsed()) return do_profile(prof_cfg, prof_max_interval, prof_out_csv,
                                                  prof_out_json);
        return 1;
    } catch (const EigsFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace dynsvd
