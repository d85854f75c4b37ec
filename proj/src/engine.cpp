#include "dynsvd/engine.hpp"

#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dynsvd/loss.hpp"

namespace dynsvd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

long long canonical_count(const DeltaMatrix& d) {
    long long c = 0;
    d.for_each_canonical([&](int, int, double) { ++c; });
    return c;
}

}  // namespace

double RunRecord::total_monitor_seconds() const {
    double s = init_seconds;
    for (const auto& r : slices) s += r.monitor_seconds;
    return s;
}

double RunRecord::total_restart_seconds() const {
    double s = 0.0;
    for (const auto& r : slices) s += r.restart_seconds;
    return s;
}

std::vector<BetweenRestart> between_restart_stats(const RunRecord& record) {
    std::vector<BetweenRestart> out;
    BetweenRestart cur;
    double loss_at_anchor = record.initial_loss;
    for (const auto& r : record.slices) {
        cur.edges += r.edge_changes;
        cur.slices += 1;
        if (r.restarted) {
            cur.loss_change = r.loss - loss_at_anchor;
            out.push_back(cur);
            cur = BetweenRestart{};
            loss_at_anchor = r.loss_post;
        }
    }
    return out;
}

RunResult run(const SymSparseMatrix& a0, const SliceStream& stream, Similarity sim, int k,
              const RestartPolicy& policy, const Updater& updater, const RunOptions& opts) {
    if (stream.n != a0.dim()) {
        throw std::invalid_argument("run: stream dimension does not match the static matrix");
    }
    validate(policy);
    if (k < 1 || k > a0.dim()) throw std::invalid_argument("run: k must be in [1, n]");

    RunResult out;
    const int T = stream.T();
    out.record.slices.reserve(static_cast<std::size_t>(T));

    auto t_init = Clock::now();
    SymSparseMatrix a = a0;
    SymSparseMatrix s = apply_similarity(sim, a0);
    EigPairs eig;
    try {
        eig = topk_eigs(s, k, EigenOrder::Magnitude, opts.eig);
    } catch (const EigsFailure& e) {
        throw EigsFailure(std::string("run: initial decomposition failed: ") + e.what(),
                          e.residuals());
    }
    SpectralFactors f = SpectralFactors::from_eigs(eig);
    double anchor_loss = min_loss(s.frob_sq(), eig.values);
    MonitorState mon = MonitorState::anchored(s, anchor_loss, 0);
    out.record.init_seconds = seconds_since(t_init);
    out.record.initial_loss = anchor_loss;

    const double initial_loss = anchor_loss;
    long long edges_since = 0;
    int slices_since = 0;
    const std::vector<int> no_rows;
    std::vector<int> all_rows(static_cast<std::size_t>(a0.dim()));
    std::iota(all_rows.begin(), all_rows.end(), 0);

    if (opts.keep_factors) out.factors.push_back(f);

    for (int t = 1; t <= T; ++t) {
        const DeltaMatrix& da = stream.slices[static_cast<std::size_t>(t - 1)];
        SliceRecord rec;
        rec.t = t;
        rec.edge_changes = canonical_count(da);

        const auto t_mon = Clock::now();
        WorkCounters counters;
        WorkCounters loss_counters;
        DeltaMatrix ds = similarity_delta(sim, a, da, s);
        rec.m_s = static_cast<long long>(ds.stored_count());

        SpectralFactors f_next = apply_updater(updater, f, s, ds);

        double j = loss_update_delta(mon.current_loss, f, s, ds, &loss_counters);
        s.add_scaled(ds);
        a.add_scaled(da);
        if (updater_changes_factors(updater)) {
            j = loss_update_rows(j, f, f_next, all_rows, s);
        }
        f = std::move(f_next);

        mon.cum_delta.add_scaled(ds);
        mon.current_loss = j;
        int support = 0;
        double b;
        try {
            b = lower_bound_with_support(mon, k, opts.eig, &counters, &support);
        } catch (const EigsFailure& e) {
            throw EigsFailure("run: bound eigensolve failed at slice " + std::to_string(t) +
                                  ": " + e.what(),
                              e.residuals());
        }
        mon.current_bound = b;
        rec.loss = j;
        rec.bound = b;
        rec.margin = b > 0.0 ? (j - b) / b : std::numeric_limits<double>::infinity();
        rec.nabla_support = support;
        rec.row_touches = counters.rows_touched;
        rec.entry_visits = counters.entries_visited + loss_counters.entries_visited;
        rec.loss_update_visits = loss_counters.entries_visited;

        edges_since += rec.edge_changes;
        slices_since += 1;
        rec.monitor_seconds = seconds_since(t_mon);

        PolicyContext ctx{j, b, initial_loss, edges_since, slices_since};
        rec.restarted = decide(policy, ctx);
        if (rec.restarted) {
            const auto t_rst = Clock::now();
            try {
                eig = topk_eigs(s, k, EigenOrder::Magnitude, opts.eig);
            } catch (const EigsFailure& e) {
                throw EigsFailure("run: restart decomposition failed at slice " +
                                      std::to_string(t) + ": " + e.what(),
                                  e.residuals());
            }
            f = SpectralFactors::from_eigs(eig);
            anchor_loss = min_loss(s.frob_sq(), eig.values);
            mon = MonitorState::anchored(s, anchor_loss, t);
            edges_since = 0;
            slices_since = 0;
            out.record.restart_count += 1;
            rec.restart_seconds = seconds_since(t_rst);
        }
        rec.loss_post = mon.current_loss;
        rec.bound_post = mon.current_bound;
        out.record.slices.push_back(rec);
        if (opts.keep_factors) out.factors.push_back(f);
    }
    out.final_factors = f;
    return out;
}

}  // namespace dynsvd
