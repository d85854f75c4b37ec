#pragma once

#include <vector>

#include "dynsvd/events.hpp"
#include "dynsvd/factors.hpp"
#include "dynsvd/monitor.hpp"
#include "dynsvd/policy.hpp"
#include "dynsvd/similarity.hpp"
#include "dynsvd/updater.hpp"

namespace dynsvd {

/// One row of the per-slice log. Loss/bound/margin are the values the
/// restart decision saw (pre-restart); *_post carry the state after a
/// restart reset (equal to the pre values when no restart fired). margin is
/// +infinity when the bound is non-positive.
struct SliceRecord {
    int t = 0;
    bool restarted = false;
    double loss = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    double loss_post = 0.0;
    double bound_post = 0.0;
    long long edge_changes = 0;     // canonical changed positions in the slice's dA
    long long m_s = 0;              // stored elements of dS (mirrors counted)
    long long nabla_support = 0;       // N_L of the bound evaluation
    long long row_touches = 0;         // monitoring matvec rows written
    long long entry_visits = 0;        // monitoring entries read (all paths)
    long long loss_update_visits = 0;  // entries read by the incremental loss path
    double monitor_seconds = 0.0;
    double restart_seconds = 0.0;
};

struct RunRecord {
    std::vector<SliceRecord> slices;
    int restart_count = 0;
    double init_seconds = 0.0;
    double initial_loss = 0.0;

    double total_monitor_seconds() const;
    double total_restart_seconds() const;
};

/// Edge count, slice interval and loss change between consecutive restarts
/// (the measurements the heuristic baselines key on).
struct BetweenRestart {
    long long edges = 0;
    int slices = 0;
    double loss_change = 0.0;
};
std::vector<BetweenRestart> between_restart_stats(const RunRecord& record);

struct RunOptions {
    LanczosOptions eig;
    bool keep_factors = true;
};

struct RunResult {
    RunRecord record;
    std::vector<SpectralFactors> factors;  // index t in [0, T]; empty unless kept
    SpectralFactors final_factors;
};

/// The per-slice maintenance loop: initial decomposition on S(A0); per slice
/// apply the similarity change, run the updater, refresh J incrementally and
/// B from the anchored perturbation bound, then restart (fresh top-k
/// decomposition, monitor re-anchored) when the policy fires. Factors for
/// every slice are produced whether or not a restart happened.
RunResult run(const SymSparseMatrix& a0, const SliceStream& stream, Similarity sim, int k,
              const RestartPolicy& policy, const Updater& updater, const RunOptions& opts = {});

}  // namespace dynsvd
