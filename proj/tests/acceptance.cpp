// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Each criterion pins its tolerances in code; the dense eigendecomposition
// is the ground-truth reference throughout.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "dynsvd/cli_app.hpp"
#include "dynsvd/experiments.hpp"
#include "dynsvd/loss.hpp"
#include "dynsvd/monitor.hpp"
#include "dynsvd/report.hpp"
#include "test_support.hpp"

using namespace dynsvd;
using namespace testsup;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------- criterion 1
Outcome bound_validity() {
    const int trials = 1000;
    int held = 0;
    double worst_violation = 0.0;
    CounterRng rng(20260801);
    for (int rep = 0; rep < trials; ++rep) {
        const int n = 10 + static_cast<int>(rng.next_below(91));  // [10, 100]
        const double density = 0.02 + 0.18 * rng.next_double();   // <= 0.2
        SymSparseMatrix s = random_sym(rng, n, density, true, true);
        if (s.empty()) s.set(0, 1, rng.next_symmetric() + 0.5);
        // mixed-sign delta; one third of the changes delete or rescale
        // existing entries
        DeltaMatrix d(n);
        const int changes = 2 + static_cast<int>(rng.next_below(20));
        for (int c = 0; c < changes; ++c) {
            int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (i == j) continue;
            if (rng.next_below(3) == 0 && s.has(i, j)) {
                d.add(i, j, -s.at(i, j));  // deletion
            } else {
                d.add(i, j, rng.next_symmetric());
            }
        }
        const int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));

        EigPairs anchor = topk_eigs(s, k, EigenOrder::Magnitude);
        MonitorState st = MonitorState::anchored(s, min_loss(s.frob_sq(), anchor.values), 0);
        st.cum_delta.add_scaled(d);
        const double b = lower_bound(st, k);

        SymSparseMatrix s_new = s;
        s_new.add_scaled(d);
        const double truth = min_loss(
            s_new.frob_sq(), dense_topk_values(to_dense(s_new), k, EigenOrder::Magnitude));
        const double slack = 1e-9 * s_new.frob_sq();
        if (b <= truth + slack) {
            ++held;
        } else {
            worst_violation = std::max(worst_violation, b - truth);
        }
    }
    Outcome out;
    out.pass = held == trials;
    out.detail = std::to_string(held) + "/" + std::to_string(trials) + " bounds held";
    if (!out.pass) out.detail += ", worst violation " + fmt(worst_violation);
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome sub_additivity() {
    const int pairs = 500;
    int held = 0;
    CounterRng rng(20260802);
    for (int rep = 0; rep < pairs; ++rep) {
        const int n = 10 + static_cast<int>(rng.next_below(91));
        const Eigen::MatrixXd p = to_dense(random_sym(rng, n, 0.3, true, true));
        const Eigen::MatrixXd q = to_dense(random_sym(rng, n, 0.3, true, true));
        const double slack = 1e-9 * std::pow(p.norm() + q.norm(), 2);
        bool ok = true;
        for (int k : {1, 5, n / 2}) {
            if (k < 1 || k > n) continue;
            const double lp = dense_topk_values(p, k, EigenOrder::Algebraic).sum();
            const double lq = dense_topk_values(q, k, EigenOrder::Algebraic).sum();
            const double lpq = dense_topk_values(p + q, k, EigenOrder::Algebraic).sum();
            ok &= lpq <= lp + lq + slack;
        }
        held += ok;
    }
    return Outcome{held == pairs,
                   std::to_string(held) + "/" + std::to_string(pairs) + " pairs held"};
}

// ---------------------------------------------------------------- criterion 3
Outcome incremental_loss_equivalence() {
    const int sequences = 500;
    int ok = 0;
    double worst = 0.0;
    CounterRng rng(20260803);
    for (int rep = 0; rep < sequences; ++rep) {
        const int n = 10 + static_cast<int>(rng.next_below(31));
        const int k = 1 + static_cast<int>(rng.next_below(8));
        SymSparseMatrix s = random_sym(rng, n, 0.25);
        SpectralFactors f = random_factors(rng, n, k);
        GramCache cache = GramCache::of(f);
        double j = reconstruction_loss(s, f);
        bool good = true;
        for (int step = 0; step < 5; ++step) {
            if (rng.next_below(2) == 0) {
                DeltaMatrix d = random_delta(rng, n, 5);
                j = loss_update_delta(j, f, s, d);
                s.add_scaled(d);
            } else {
                SpectralFactors f_new = f;
                std::vector<int> changed;
                const int c = 1 + static_cast<int>(rng.next_below(3));
                for (int t = 0; t < c; ++t) {
                    const int node =
                        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                    changed.push_back(node);
                    for (int l = 0; l < k; ++l) {
                        f_new.u(node, l) = rng.next_symmetric();
                        f_new.v(node, l) = rng.next_symmetric();
                    }
                }
                j = loss_update_rows(j, f, f_new, changed, s, &cache);
                f = f_new;
            }
            const double full = reconstruction_loss(s, f);
            const double tol = 1e-8 * full + 1e-12 * s.frob_sq();
            const double err = std::abs(j - full);
            worst = std::max(worst, err / std::max(full, 1e-300));
            good &= err <= tol;
        }
        ok += good;
    }
    Outcome out;
    out.pass = ok == sequences;
    out.detail = std::to_string(ok) + "/" + std::to_string(sequences) +
                 " sequences matched, worst rel diff " + fmt(worst);
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome worked_fixture() {
    SymSparseMatrix s = triangle();
    DeltaMatrix d(3);
    d.set(0, 1, 1.0);

    const double dtr2 = delta_tr2(s, d);
    NablaOperator op(s, d);
    const double lam1 = nabla_topk(op, 1)[0];
    MonitorState st = MonitorState::anchored(s, 2.0, 0);
    st.cum_delta.add_scaled(d);
    const double b = lower_bound(st, 1);

    const double want_lam = (3.0 + std::sqrt(17.0)) / 2.0;
    const double want_b = 8.0 - want_lam;
    const double true_loss = 12.0 - std::pow(1.0 + std::sqrt(3.0), 2);

    SymSparseMatrix s_new = s;
    s_new.add_scaled(d);
    const double oracle_loss =
        min_loss(s_new.frob_sq(), dense_topk_values(to_dense(s_new), 1, EigenOrder::Magnitude));

    Outcome out;
    out.pass = std::abs(dtr2 - 6.0) <= 1e-10 && std::abs(lam1 - want_lam) <= 1e-10 &&
               std::abs(b - want_b) <= 1e-10 && std::abs(oracle_loss - true_loss) <= 1e-10 &&
               b <= true_loss;
    out.detail = "dtr2=" + fmt(dtr2) + " lam1=" + fmt(lam1) + " B=" + fmt(b) +
                 " trueL=" + fmt(oracle_loss);
    return out;
}

// ------------------------------------------------------- criteria 5a, 5b, 6
struct SeedCell {
    bool margin_exact = false;
    double margin_max_r = 0.0;
    int margin_restarts = 0;
    std::vector<double> baseline_max_r;   // lwi2, fixed-edges, fixed-slices
    std::vector<int> baseline_needed;     // restarts needed at margin's error level
    bool eq8_checked = false;
    bool eq8_ok = true;
};

ExperimentSetup make_injected_setup(const std::string& model, std::uint64_t seed) {
    // ~30% of the evolving edges come from the injection, landing on a slice
    // drawn per seed (nothing aligns with the fixed-cadence baselines)
    CounterRng trig_rng(seed ^ 0x7121);
    const int trigger = 2 + static_cast<int>(trig_rng.next_below(17));  // [2, 18] of T=20
    SyntheticSpec spec;
    if (model == "celebrity") {
        spec.model = CelebritySpec{RandomSpec{500, 2000, 1000}, trigger, std::nullopt, 0.857};
    } else {
        spec.model = CommunitySpec{RandomSpec{500, 2000, 1000}, trigger, 0.2, 5, 0.45};
    }
    spec.seed = seed;
    Synthetic g = generate(spec, 20);
    ExperimentSetup setup;
    setup.a0 = std::move(g.a0);
    setup.stream = std::move(g.stream);
    setup.sim = Similarity::Identity;
    setup.k = 20;
    setup.updater = HoldUpdater{};
    setup.eig.seed = seed;
    return setup;
}

SeedCell run_seed_cell(const std::string& model, std::uint64_t seed, int budget) {
    SeedCell cell;
    ExperimentSetup setup = make_injected_setup(model, seed);
    const std::vector<double> oracle = oracle_min_loss_per_slice(setup);

    std::vector<RestartPolicy> all{MarginPolicy{}, Lwi2Policy{}, FixedEdgesPolicy{},
                                   FixedSlicesPolicy{}};
    const std::vector<PolicyOutcome> outcomes =
        sweep_fixed_restarts(setup, all, budget, &oracle);
    cell.margin_exact = outcomes[0].exact;
    cell.margin_max_r = outcomes[0].errors.max_r;
    cell.margin_restarts = outcomes[0].restarts;
    for (std::size_t i = 1; i < outcomes.size(); ++i) {
        cell.baseline_max_r.push_back(outcomes[i].errors.max_r);
    }

    // criterion 6 on the tuned margin run: every slice's true error must sit
    // below the recorded margin, and below theta at non-restart slices
    {
        RunOptions opts;
        opts.eig = setup.eig;
        opts.keep_factors = false;
        const double theta = outcomes[0].knob;
        RunResult r = run(setup.a0, setup.stream, setup.sim, setup.k, MarginPolicy{theta},
                          setup.updater, opts);
        bool all_bounds_positive = true;
        for (const auto& s : r.record.slices) all_bounds_positive &= s.bound > 0.0;
        if (all_bounds_positive) {
            cell.eq8_checked = true;
            for (const auto& s : r.record.slices) {
                const double l = oracle[static_cast<std::size_t>(s.t - 1)];
                const double true_r = (s.loss - l) / l;
                cell.eq8_ok &= true_r <= (s.loss - s.bound) / s.bound + 1e-9;
                if (!s.restarted) cell.eq8_ok &= true_r <= theta + 1e-9;
            }
        }
    }

    // criterion 5b: restarts each baseline needs to match margin's error level
    for (const RestartPolicy& baseline :
         {RestartPolicy{Lwi2Policy{}}, RestartPolicy{FixedEdgesPolicy{}},
          RestartPolicy{FixedSlicesPolicy{}}}) {
        try {
            const std::vector<PolicyOutcome> inv =
                sweep_fixed_max_error(setup, {baseline}, cell.margin_max_r, oracle);
            cell.baseline_needed.push_back(inv.front().restarts);
        } catch (const std::exception&) {
            cell.baseline_needed.push_back(setup.stream.T() + 1);  // unreachable even at floor
        }
    }
    return cell;
}

struct HeadToHead {
    Outcome a, b, eq8;
};

HeadToHead injected_comparison() {
    const int budget = 4;
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<std::string> models{"celebrity", "community"};
    const char* baseline_names[3] = {"lwi2", "fixed-edges", "fixed-slices"};

    std::vector<std::vector<SeedCell>> cells(models.size());
    for (auto& v : cells) v.resize(seeds.size());

    std::atomic<std::size_t> next{0};
    const std::size_t total = models.size() * seeds.size();
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            const std::size_t mi = i / seeds.size();
            const std::size_t si = i % seeds.size();
            cells[mi][si] = run_seed_cell(models[mi], seeds[si], budget);
        }
    };
    const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<unsigned>(hw, 8); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    HeadToHead out;
    std::ostringstream da, db, de;
    bool eq8_all = true;
    int eq8_runs = 0;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        int wins_a[3] = {0, 0, 0};
        int wins_b[3] = {0, 0, 0};
        int exact = 0;
        for (const SeedCell& c : cells[mi]) {
            exact += c.margin_exact;
            for (int bi = 0; bi < 3; ++bi) {
                wins_a[bi] += c.margin_max_r < c.baseline_max_r[static_cast<std::size_t>(bi)];
                wins_b[bi] += c.baseline_needed[static_cast<std::size_t>(bi)] >=
                              c.margin_restarts;
            }
            if (c.eq8_checked) {
                ++eq8_runs;
                eq8_all &= c.eq8_ok;
            }
        }
        da << models[mi] << "(exact " << exact << "/10:";
        db << models[mi] << "(";
        for (int bi = 0; bi < 3; ++bi) {
            da << " " << baseline_names[bi] << " " << wins_a[bi] << "/10";
            db << " " << baseline_names[bi] << " " << wins_b[bi] << "/10";
            out.a.pass &= wins_a[bi] >= 8;
            out.b.pass &= wins_b[bi] >= 8;
        }
        da << ") ";
        db << ") ";
    }
    de << "margin guarantee held in " << eq8_runs << " bound-positive runs";
    out.a.detail = da.str();
    out.b.detail = db.str();
    out.eq8.pass = eq8_all && eq8_runs > 0;
    out.eq8.detail = de.str();
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome locality_scaling() {
    // changes stay local: ~10 edges per slice at n=625, scaled with the graph
    auto pts = scalability_probe(RandomSpec{625, 2500, 200}, 4, 20, 20, 77);
    std::vector<double> work, cost;
    for (const auto& p : pts) {
        work.push_back(static_cast<double>(p.m_s_total + p.support_total));
        cost.push_back(static_cast<double>(p.row_touches + p.loss_visits));
    }
    const double slope = loglog_slope(work, cost);
    Outcome out;
    out.pass = slope <= 1.3;
    out.detail = "matvec row touches + loss-update visits vs (M_S + support) slope " +
                 fmt(slope) + " over n=625..5000";
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome eigensolver_equivalence() {
    const int instances = 200;
    int ok = 0;
    double worst = 0.0;
    CounterRng rng(20260808);
    for (int rep = 0; rep < instances; ++rep) {
        const int n = 10 + static_cast<int>(rng.next_below(191));  // <= 200
        SymSparseMatrix m = random_sym(rng, n, 0.1, true, true);
        if (m.empty()) m.set(0, 1, 1.0);
        const int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        const double scale = std::sqrt(m.frob_sq());
        const Eigen::MatrixXd dense = to_dense(m);
        bool good = true;
        for (EigenOrder order : {EigenOrder::Magnitude, EigenOrder::Algebraic}) {
            EigPairs got = topk_eigs(m, k, order);
            Eigen::VectorXd want = dense_topk_values(dense, k, order);
            for (int l = 0; l < k; ++l) {
                // magnitude order admits either member of an exact +/- tie, so
                // compare the ordering keys; the residual certifies the signed
                // value and vector as a genuine eigenpair either way
                const double key_got = order == EigenOrder::Magnitude
                                           ? std::abs(got.values[l])
                                           : got.values[l];
                const double key_want = order == EigenOrder::Magnitude
                                            ? std::abs(want[l])
                                            : want[l];
                const double err = std::abs(key_got - key_want);
                const double resid =
                    (dense * got.vectors.col(l) - got.values[l] * got.vectors.col(l)).norm();
                worst = std::max(worst, std::max(err, resid) / scale);
                good &= err <= 1e-8 * scale && resid <= 1e-8 * scale;
            }
        }
        ok += good;
    }
    Outcome out;
    out.pass = ok == instances;
    out.detail = std::to_string(ok) + "/" + std::to_string(instances) +
                 " instances matched both orders, worst rel err " + fmt(worst);
    return out;
}

// ---------------------------------------------------------------- criterion 9
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    auto cli = [](std::vector<std::string> args) {
        std::vector<const char*> argv{"dynsvd"};
        for (const auto& a : args) argv.push_back(a.c_str());
        return cli_main(static_cast<int>(argv.size()), argv.data());
    };
    Outcome out;
    std::vector<std::string> run_args{"run",        "--model", "celebrity", "--n",
                                      "120",        "--m-static", "400",    "--m-evolve",
                                      "500",        "--T",     "10",        "--k",
                                      "8",          "--trigger-slice", "4", "--attach-fraction",
                                      "0.3",        "--seed",  "99",        "--oracle"};
    for (const char* tag : {"d1", "d2"}) {
        std::vector<std::string> a = run_args;
        a.insert(a.end(),
                 {"--out-csv", std::string(tag) + ".csv", "--out-json", std::string(tag) + ".json"});
        if (cli(a) != 0) return Outcome{false, "cmd_run failed"};
    }
    std::vector<std::string> bench_args{"bench",     "--model",  "random", "--n",     "100",
                                        "--m-static", "300",     "--m-evolve", "400", "--T",
                                        "8",          "--k",     "6",      "--seeds", "4,5",
                                        "--fixed-restarts", "2"};
    for (const char* tag : {"e1", "e2"}) {
        std::vector<std::string> a = bench_args;
        a.insert(a.end(),
                 {"--out-csv", std::string(tag) + ".csv", "--out-json", std::string(tag) + ".json"});
        if (cli(a) != 0) return Outcome{false, "cmd_bench failed"};
    }
    const bool run_same = slurp("d1.csv") == slurp("d2.csv") &&
                          slurp("d1.json") == slurp("d2.json");
    const bool bench_same = slurp("e1.csv") == slurp("e2.csv") &&
                            slurp("e1.json") == slurp("e2.json");
    for (const char* f : {"d1.csv", "d1.json", "d2.csv", "d2.json", "e1.csv", "e1.json",
                          "e2.csv", "e2.json"}) {
        std::remove(f);
    }
    out.pass = run_same && bench_same;
    out.detail = std::string("run ") + (run_same ? "byte-identical" : "DIFFERS") + ", bench " +
                 (bench_same ? "byte-identical" : "DIFFERS");
    return out;
}

int report(const std::string& name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    return o.pass ? 0 : 1;
}

}  // namespace

int main() {
    int failures = 0;
    failures += report("1. perturbation lower bound validity", bound_validity);
    failures += report("2. top-k eigenvalue sum sub-additivity", sub_additivity);
    failures += report("3. incremental loss equals full recomputation",
                       incremental_loss_equivalence);
    failures += report("4. worked triangle fixture", worked_fixture);

    HeadToHead h2h;
    failures += report("5a. lower max error at a fixed restart budget", [&] {
        h2h = injected_comparison();  // also computes 5b and 6
        return h2h.a;
    });
    failures += report("5b. fewer restarts at a fixed max error", [&] { return h2h.b; });
    failures += report("6. recorded margin dominates the true error", [&] { return h2h.eq8; });

    failures += report("7. monitoring cost scales with local change", locality_scaling);
    failures += report("8. iterative eigensolver matches the dense oracle",
                       eigensolver_equivalence);
    failures += report("9. byte-identical reruns", determinism);

    if (failures) std::printf("%d criteria FAILED\n", failures);
    return failures;
}
