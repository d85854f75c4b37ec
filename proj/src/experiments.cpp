#include "dynsvd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dynsvd/loss.hpp"
#include "dynsvd/rng.hpp"

namespace dynsvd {

namespace {

struct RunStats {
    int restarts = 0;
    std::vector<double> loss_post;
    double monitor_seconds = 0.0;
    double restart_seconds = 0.0;
};

RunStats collect(const ExperimentSetup& setup, const RestartPolicy& policy) {
    RunOptions opts;
    opts.eig = setup.eig;
    opts.keep_factors = false;
    RunResult r = run(setup.a0, setup.stream, setup.sim, setup.k, policy, setup.updater, opts);
    RunStats out;
    out.restarts = r.record.restart_count;
    out.loss_post.reserve(r.record.slices.size());
    for (const auto& s : r.record.slices) out.loss_post.push_back(s.loss_post);
    out.monitor_seconds = r.record.total_monitor_seconds();
    out.restart_seconds = r.record.total_restart_seconds();
    return out;
}

// Memoized knob -> run evaluation within one sweep.
class KnobRunner {
public:
    KnobRunner(const ExperimentSetup& setup, const RestartPolicy& base)
        : setup_(setup), base_(base) {}

    const RunStats& at(double knob) {
        if (knob_is_integer(base_)) knob = std::max(1.0, std::round(knob));
        auto it = memo_.find(knob);
        if (it == memo_.end()) {
            it = memo_.emplace(knob, collect(setup_, with_knob(base_, knob))).first;
        }
        return it->second;
    }

    bool integer() const { return knob_is_integer(base_); }

private:
    const ExperimentSetup& setup_;
    RestartPolicy base_;
    std::map<double, RunStats> memo_;
};

double knob_floor(const RestartPolicy& policy) {
    switch (policy.index()) {
        case 0: return 0.0;      // margin theta
        case 1: return 1e-12;    // lwi2 threshold
        default: return 1.0;     // heuristics
    }
}

double knob_ceiling(const RestartPolicy& policy, const ExperimentSetup& setup) {
    switch (policy.index()) {
        case 2: {
            long long total = 0;
            for (const auto& d : setup.stream.slices) {
                d.for_each_canonical([&](int, int, double) { ++total; });
            }
            return static_cast<double>(total + 1);
        }
        case 3: return static_cast<double>(setup.stream.T() + 1);
        default: return 0.0;  // grown by doubling
    }
}

PolicyOutcome make_outcome(const RestartPolicy& base, double knob, bool exact,
                           const RunStats& stats, const std::vector<double>* oracle) {
    RestartPolicy resolved = with_knob(base, knob);
    PolicyOutcome out;
    out.policy = policy_name(resolved);
    out.params = policy_params(resolved);
    out.knob = policy_knob(resolved);
    out.exact = exact;
    out.restarts = stats.restarts;
    out.monitor_seconds = stats.monitor_seconds;
    out.restart_seconds = stats.restart_seconds;
    if (oracle) out.errors = ErrorSeries::from_losses(stats.loss_post, *oracle);
    return out;
}

}  // namespace

std::vector<double> oracle_min_loss_per_slice(const ExperimentSetup& setup, int cap) {
    SymSparseMatrix a = setup.a0;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(setup.stream.T()));
    for (const auto& da : setup.stream.slices) {
        a.add_scaled(da);
        SymSparseMatrix s = apply_similarity(setup.sim, a);
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(s.dim(), s.dim());
        for (int i = 0; i < s.dim(); ++i) {
            for (const auto& e : s.row(i)) dense(i, e.col) = e.w;
        }
        if (s.dim() > cap) {
            throw std::invalid_argument("oracle_min_loss_per_slice: dimension above dense cap");
        }
        out.push_back(
            min_loss(s.frob_sq(), dense_topk_values(dense, setup.k, EigenOrder::Magnitude)));
    }
    return out;
}

std::vector<PolicyOutcome> sweep_fixed_restarts(const ExperimentSetup& setup,
                                                const std::vector<RestartPolicy>& policies,
                                                int target_restarts,
                                                const std::vector<double>* oracle) {
    if (target_restarts < 0) {
        throw std::invalid_argument("sweep_fixed_restarts: target must be >= 0");
    }
    std::vector<PolicyOutcome> out;
    for (const RestartPolicy& base : policies) {
        KnobRunner runner(setup, base);
        double lo = knob_floor(base);
        const int count_lo = runner.at(lo).restarts;
        if (count_lo <= target_restarts) {
            // the tightest knob already is at or below the target
            out.push_back(make_outcome(base, lo, count_lo == target_restarts, runner.at(lo),
                                       oracle));
            continue;
        }
        double hi = knob_ceiling(base, setup);
        if (hi <= 0.0) {
            hi = 1.0;
            while (runner.at(hi).restarts > target_restarts && hi < 1e15) hi *= 4.0;
        }
        if (runner.at(hi).restarts > target_restarts) {
            out.push_back(make_outcome(base, hi, false, runner.at(hi), oracle));
            continue;
        }
        // invariant: count(lo) > target >= count(hi)
        if (runner.integer()) {
            while (hi - lo > 1.0) {
                const double mid = std::floor((lo + hi) / 2.0);
                if (runner.at(mid).restarts > target_restarts) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        } else {
            for (int it = 0; it < 40 && hi - lo > 1e-3 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (runner.at(mid).restarts > target_restarts) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        const RunStats& at_hi = runner.at(hi);
        if (at_hi.restarts == target_restarts) {
            out.push_back(make_outcome(base, hi, true, at_hi, oracle));
        } else {
            // the count function jumps over the target; keep the nearer side
            const RunStats& at_lo = runner.at(lo);
            const bool lo_closer = std::abs(at_lo.restarts - target_restarts) <=
                                   std::abs(at_hi.restarts - target_restarts);
            const double knob = lo_closer ? lo : hi;
            out.push_back(make_outcome(base, knob, false, runner.at(knob), oracle));
        }
    }
    return out;
}

std::vector<PolicyOutcome> sweep_fixed_max_error(const ExperimentSetup& setup,
                                                 const std::vector<RestartPolicy>& policies,
                                                 double target_max_r,
                                                 const std::vector<double>& oracle) {
    std::vector<PolicyOutcome> out;
    for (const RestartPolicy& base : policies) {
        KnobRunner runner(setup, base);
        auto max_r_at = [&](double knob) {
            return ErrorSeries::from_losses(runner.at(knob).loss_post, oracle).max_r;
        };
        double lo = knob_floor(base);
        if (max_r_at(lo) > target_max_r) {
            throw std::runtime_error("sweep_fixed_max_error: target below the achievable floor "
                                     "for policy " +
                                     policy_name(base));
        }
        double hi = knob_ceiling(base, setup);
        if (hi <= 0.0) {
            hi = 1.0;
            while (max_r_at(hi) <= target_max_r && hi < 1e15) hi *= 4.0;
        }
        if (max_r_at(hi) <= target_max_r) {
            out.push_back(make_outcome(base, hi, true, runner.at(hi), &oracle));
            continue;
        }
        // invariant: max_r(lo) <= target < max_r(hi); loosest satisfying knob is lo
        if (runner.integer()) {
            while (hi - lo > 1.0) {
                const double mid = std::floor((lo + hi) / 2.0);
                if (max_r_at(mid) <= target_max_r) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        } else {
            for (int it = 0; it < 40 && hi - lo > 1e-3 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (max_r_at(mid) <= target_max_r) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        out.push_back(make_outcome(base, lo, true, runner.at(lo), &oracle));
    }
    return out;
}

std::vector<ProfilePoint> error_accumulation_profile(const ExperimentSetup& setup,
                                                     const std::vector<int>& intervals,
                                                     int cap) {
    const int T = setup.stream.T();
    int max_iv = 0;
    for (int iv : intervals) {
        if (iv < 1) throw std::invalid_argument("error_accumulation_profile: interval < 1");
        max_iv = std::max(max_iv, iv);
    }
    if (T < max_iv + 1) {
        throw std::invalid_argument("error_accumulation_profile: stream shorter than interval+1");
    }

    // materialize per-slice matrices, ground truths and fresh factors once
    std::vector<SymSparseMatrix> s_at;
    s_at.reserve(static_cast<std::size_t>(T) + 1);
    SymSparseMatrix a = setup.a0;
    s_at.push_back(apply_similarity(setup.sim, a));
    for (const auto& da : setup.stream.slices) {
        a.add_scaled(da);
        s_at.push_back(apply_similarity(setup.sim, a));
    }
    std::vector<double> truth(static_cast<std::size_t>(T) + 1);
    std::vector<SpectralFactors> fresh(static_cast<std::size_t>(T) + 1);
    for (int t = 0; t <= T; ++t) {
        const SymSparseMatrix& s = s_at[static_cast<std::size_t>(t)];
        if (s.dim() > cap) {
            throw std::invalid_argument("error_accumulation_profile: dimension above dense cap");
        }
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(s.dim(), s.dim());
        for (int i = 0; i < s.dim(); ++i) {
            for (const auto& e : s.row(i)) dense(i, e.col) = e.w;
        }
        truth[static_cast<std::size_t>(t)] =
            min_loss(s.frob_sq(), dense_topk_values(dense, setup.k, EigenOrder::Magnitude));
        fresh[static_cast<std::size_t>(t)] = SpectralFactors::from_eigs(
            topk_eigs(s, setup.k, EigenOrder::Magnitude, setup.eig));
    }

    std::vector<ProfilePoint> out;
    for (int iv : intervals) {
        ProfilePoint p;
        p.interval = iv;
        std::vector<double> rs;
        for (int t0 = 1; t0 + iv <= T; ++t0) {
            const double j = reconstruction_loss(s_at[static_cast<std::size_t>(t0 + iv)],
                                                 fresh[static_cast<std::size_t>(t0)]);
            rs.push_back(relative_error(j, truth[static_cast<std::size_t>(t0 + iv)]));
        }
        p.samples = static_cast<int>(rs.size());
        double sum = 0.0;
        for (double r : rs) sum += r;
        p.mean_r = rs.empty() ? 0.0 : sum / static_cast<double>(rs.size());
        double var = 0.0;
        for (double r : rs) var += (r - p.mean_r) * (r - p.mean_r);
        p.std_r = rs.empty() ? 0.0 : std::sqrt(var / static_cast<double>(rs.size()));
        out.push_back(p);
    }
    return out;
}

namespace {

DeltaMatrix matrix_diff(const SymSparseMatrix& from, const SymSparseMatrix& to) {
    DeltaMatrix d(from.dim());
    to.for_each_canonical([&](int i, int j, double w) {
        const double diff = w - from.at(i, j);
        if (diff != 0.0) d.set(i, j, diff);
    });
    from.for_each_canonical([&](int i, int j, double w) {
        if (!to.has(i, j)) d.set(i, j, -w);
    });
    return d;
}

struct Position {
    int i, j;
    double value;
};

std::vector<Position> canonical_entries(const SymSparseMatrix& m) {
    std::vector<Position> out;
    m.for_each_canonical([&](int i, int j, double w) { out.push_back(Position{i, j, w}); });
    return out;
}

std::vector<std::size_t> sample_distinct(CounterRng& rng, std::size_t count, std::size_t upper) {
    std::unordered_set<std::size_t> picked;
    std::vector<std::size_t> out;
    while (out.size() < count) {
        const std::size_t x = rng.next_below(upper);
        if (picked.insert(x).second) out.push_back(x);
    }
    return out;
}

}  // namespace

std::vector<LinkPredictionResult> link_prediction(const ExperimentSetup& setup,
                                                  const std::vector<RestartPolicy>& policies,
                                                  int target_restarts, double hide_fraction,
                                                  const std::vector<std::uint64_t>& seeds,
                                                  HideMode mode) {
    if (setup.sim != Similarity::Identity) {
        throw std::invalid_argument("link_prediction: identity similarity only");
    }
    if (!(hide_fraction > 0.0 && hide_fraction < 1.0)) {
        throw std::invalid_argument("link_prediction: hide_fraction outside (0, 1)");
    }
    const int T = setup.stream.T();

    // full matrices per slice
    std::vector<SymSparseMatrix> full;
    full.reserve(static_cast<std::size_t>(T) + 1);
    full.push_back(setup.a0);
    for (const auto& da : setup.stream.slices) {
        SymSparseMatrix next = full.back();
        next.add_scaled(da);
        full.push_back(std::move(next));
    }

    std::vector<LinkPredictionResult> results;
    for (const RestartPolicy& p : policies) {
        results.push_back(LinkPredictionResult{policy_name(p), 0.0, {}});
    }

    for (std::uint64_t seed : seeds) {
        CounterRng rng(seed);
        // hidden positions per slice index (0..T)
        std::vector<std::vector<Position>> hidden(static_cast<std::size_t>(T) + 1);
        if (mode == HideMode::OnceGlobal) {
            const std::vector<Position> entries = canonical_entries(full.back());
            const std::size_t count =
                static_cast<std::size_t>(hide_fraction * static_cast<double>(entries.size()));
            if (count == 0) throw std::invalid_argument("link_prediction: hidden set empty");
            std::unordered_set<std::uint64_t> keys;
            std::vector<Position> chosen;
            for (std::size_t idx : sample_distinct(rng, count, entries.size())) {
                chosen.push_back(entries[idx]);
                keys.insert((static_cast<std::uint64_t>(entries[idx].i) << 32) |
                            static_cast<std::uint64_t>(entries[idx].j));
            }
            for (int t = 0; t <= T; ++t) {
                for (const Position& pos : chosen) {
                    const double v = full[static_cast<std::size_t>(t)].at(pos.i, pos.j);
                    if (v != 0.0) {
                        hidden[static_cast<std::size_t>(t)].push_back(Position{pos.i, pos.j, v});
                    }
                }
            }
        } else {
            for (int t = 0; t <= T; ++t) {
                const std::vector<Position> entries =
                    canonical_entries(full[static_cast<std::size_t>(t)]);
                const std::size_t count = static_cast<std::size_t>(
                    hide_fraction * static_cast<double>(entries.size()));
                if (count == 0) throw std::invalid_argument("link_prediction: hidden set empty");
                for (std::size_t idx : sample_distinct(rng, count, entries.size())) {
                    hidden[static_cast<std::size_t>(t)].push_back(entries[idx]);
                }
            }
        }

        // visible matrices and the visible stream
        std::vector<SymSparseMatrix> visible;
        visible.reserve(static_cast<std::size_t>(T) + 1);
        for (int t = 0; t <= T; ++t) {
            SymSparseMatrix v = full[static_cast<std::size_t>(t)];
            for (const Position& pos : hidden[static_cast<std::size_t>(t)]) {
                v.set(pos.i, pos.j, 0.0);
            }
            visible.push_back(std::move(v));
        }
        SliceStream vis_stream;
        vis_stream.n = setup.a0.dim();
        vis_stream.mode = setup.stream.mode;
        for (int t = 1; t <= T; ++t) {
            vis_stream.slices.push_back(matrix_diff(visible[static_cast<std::size_t>(t - 1)],
                                                    visible[static_cast<std::size_t>(t)]));
        }
        ExperimentSetup vis_setup{visible.front(), vis_stream, setup.sim, setup.k,
                                  setup.updater, setup.eig};

        // optimal per-slice MSE on the hidden positions (shared by policies)
        std::vector<double> mse_opt(static_cast<std::size_t>(T) + 1, 0.0);
        for (int t = 1; t <= T; ++t) {
            const auto& vt = visible[static_cast<std::size_t>(t)];
            const auto& h = hidden[static_cast<std::size_t>(t)];
            if (h.empty() || vt.empty()) continue;
            SpectralFactors opt = SpectralFactors::from_eigs(
                topk_eigs(vt, setup.k, EigenOrder::Magnitude, setup.eig));
            double acc = 0.0;
            for (const Position& pos : h) {
                const double err = pos.value - opt.reconstruct_entry(pos.i, pos.j);
                acc += err * err;
            }
            mse_opt[static_cast<std::size_t>(t)] = acc / static_cast<double>(h.size());
        }

        for (std::size_t pi = 0; pi < policies.size(); ++pi) {
            const std::vector<PolicyOutcome> tuned =
                sweep_fixed_restarts(vis_setup, {policies[pi]}, target_restarts);
            RunOptions opts;
            opts.eig = setup.eig;
            RunResult r = run(vis_setup.a0, vis_setup.stream, vis_setup.sim, vis_setup.k,
                              with_knob(policies[pi], tuned.front().knob), vis_setup.updater,
                              opts);
            double rel_sum = 0.0;
            int rel_count = 0;
            for (int t = 1; t <= T; ++t) {
                const auto& h = hidden[static_cast<std::size_t>(t)];
                if (h.empty()) continue;
                double acc = 0.0;
                for (const Position& pos : h) {
                    const double err =
                        pos.value -
                        r.factors[static_cast<std::size_t>(t)].reconstruct_entry(pos.i, pos.j);
                    acc += err * err;
                }
                const double mse_p = acc / static_cast<double>(h.size());
                const double mse_o = mse_opt[static_cast<std::size_t>(t)];
                if (mse_o <= 0.0) {
                    rel_sum += (mse_p <= 1e-12) ? 0.0 : mse_p / 1e-12;
                } else {
                    rel_sum += (mse_p - mse_o) / mse_o;
                }
                ++rel_count;
            }
            results[pi].per_seed.push_back(rel_count ? rel_sum / rel_count : 0.0);
        }
    }

    for (auto& r : results) {
        double sum = 0.0;
        for (double v : r.per_seed) sum += v;
        r.relative_mse = r.per_seed.empty() ? 0.0 : sum / static_cast<double>(r.per_seed.size());
    }
    return results;
}

std::vector<TrackingResult> eigen_tracking(const ExperimentSetup& setup,
                                           const std::vector<RestartPolicy>& policies,
                                           int target_restarts, int cap) {
    const int T = setup.stream.T();
    // dense-oracle top eigenvalue (by magnitude, signed) per slice
    std::vector<double> truth(static_cast<std::size_t>(T) + 1, 0.0);
    {
        SymSparseMatrix a = setup.a0;
        for (int t = 0; t <= T; ++t) {
            if (t > 0) a.add_scaled(setup.stream.slices[static_cast<std::size_t>(t - 1)]);
            SymSparseMatrix s = apply_similarity(setup.sim, a);
            if (s.dim() > cap) {
                throw std::invalid_argument("eigen_tracking: dimension above dense cap");
            }
            Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(s.dim(), s.dim());
            for (int i = 0; i < s.dim(); ++i) {
                for (const auto& e : s.row(i)) dense(i, e.col) = e.w;
            }
            truth[static_cast<std::size_t>(t)] =
                s.empty() ? 0.0 : dense_topk_values(dense, 1, EigenOrder::Magnitude)[0];
        }
    }

    std::vector<TrackingResult> out;
    for (const RestartPolicy& p : policies) {
        const std::vector<PolicyOutcome> tuned = sweep_fixed_restarts(setup, {p}, target_restarts);
        RunOptions opts;
        opts.eig = setup.eig;
        RunResult r = run(setup.a0, setup.stream, setup.sim, setup.k,
                          with_knob(p, tuned.front().knob), setup.updater, opts);
        double acc = 0.0;
        for (int t = 1; t <= T; ++t) {
            const double tracked = r.factors[static_cast<std::size_t>(t)].signed_value(0);
            const double err = tracked - truth[static_cast<std::size_t>(t)];
            acc += err * err;
        }
        out.push_back(TrackingResult{policy_name(p),
                                     T > 0 ? std::sqrt(acc / static_cast<double>(T)) : 0.0,
                                     r.record.restart_count});
    }
    return out;
}

std::vector<ScalePoint> scalability_probe(const RandomSpec& base, int steps, int T, int k,
                                          std::uint64_t seed, double theta) {
    std::vector<ScalePoint> out;
    for (int step = 0; step < steps; ++step) {
        const long long scale = 1LL << step;
        RandomSpec spec{static_cast<int>(base.n * scale), base.m_static * scale,
                        base.m_evolve * scale};
        CounterRng derive(seed);
        Synthetic g = generate(SyntheticSpec{spec, derive.fork_seed(static_cast<std::uint64_t>(step))},
                               T);
        RunOptions opts;
        opts.keep_factors = false;
        RunResult r = run(g.a0, g.stream, Similarity::Identity, k, MarginPolicy{theta},
                          HoldUpdater{}, opts);
        ScalePoint p;
        p.n = spec.n;
        p.edges = spec.m_static + spec.m_evolve;
        p.monitor_seconds = r.record.total_monitor_seconds() - r.record.init_seconds;
        p.restart_seconds = r.record.total_restart_seconds();
        for (const auto& s : r.record.slices) {
            p.row_touches += s.row_touches;
            p.entry_visits += s.entry_visits;
            p.loss_visits += s.loss_update_visits;
            p.m_s_total += s.m_s;
            p.support_total += s.nabla_support;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace dynsvd
