#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynsvd/engine.hpp"
#include "dynsvd/metrics.hpp"
#include "dynsvd/synth.hpp"

namespace dynsvd {

/// One evaluation scenario: a stream plus the model dimensions shared by
/// every policy under comparison.
struct ExperimentSetup {
    SymSparseMatrix a0;
    SliceStream stream;
    Similarity sim = Similarity::Identity;
    int k = 10;
    Updater updater = HoldUpdater{};
    LanczosOptions eig;
};

/// Dense-oracle ground-truth minimum loss per slice (index 0 = slice 1).
/// Desk-scale only: the dimension must be within the dense cap.
std::vector<double> oracle_min_loss_per_slice(const ExperimentSetup& setup,
                                              int cap = kDenseOracleCap);

/// Result of tuning one policy to a target (restart count or error level).
struct PolicyOutcome {
    std::string policy;
    std::string params;
    double knob = 0.0;
    bool exact = true;  // target hit exactly; otherwise nearest run kept
    int restarts = 0;
    ErrorSeries errors;  // filled only when ground truth was supplied
    double monitor_seconds = 0.0;
    double restart_seconds = 0.0;
};

/// Tunes each policy's knob by monotone bisection until the run's restart
/// count equals target_restarts (ties: smallest knob achieving the count).
/// Heuristic knobs bisect over integers. When `oracle` is given, the winning
/// run's per-slice errors are reported against it.
std::vector<PolicyOutcome> sweep_fixed_restarts(const ExperimentSetup& setup,
                                                const std::vector<RestartPolicy>& policies,
                                                int target_restarts,
                                                const std::vector<double>* oracle = nullptr);

/// Inverse sweep: loosest knob (fewest restarts) keeping max(r) <= target.
/// Throws std::runtime_error when the target is below the floor achievable
/// at the tightest knob.
std::vector<PolicyOutcome> sweep_fixed_max_error(const ExperimentSetup& setup,
                                                 const std::vector<RestartPolicy>& policies,
                                                 double target_max_r,
                                                 const std::vector<double>& oracle);

/// Error accumulated Delta slices after a fresh decomposition, swept over
/// every admissible start slice: mean and population standard deviation per
/// Delta.
struct ProfilePoint {
    int interval = 0;
    double mean_r = 0.0;
    double std_r = 0.0;
    int samples = 0;
};
std::vector<ProfilePoint> error_accumulation_profile(const ExperimentSetup& setup,
                                                     const std::vector<int>& intervals,
                                                     int cap = kDenseOracleCap);

enum class HideMode { PerSlice, OnceGlobal };

/// Relative MSE of hidden-edge recovery per policy, averaged over slices and
/// seeds. Each seed hides hide_fraction of the current edges (per slice, or
/// once from the final network), re-runs every policy on the visible stream
/// with its restart budget re-tuned there, and compares against a fresh
/// rank-k decomposition of the same visible matrix. Identity similarity only.
struct LinkPredictionResult {
    std::string policy;
    double relative_mse = 0.0;
    std::vector<double> per_seed;
};
std::vector<LinkPredictionResult> link_prediction(const ExperimentSetup& setup,
                                                  const std::vector<RestartPolicy>& policies,
                                                  int target_restarts, double hide_fraction,
                                                  const std::vector<std::uint64_t>& seeds,
                                                  HideMode mode = HideMode::PerSlice);

/// RMSE of the tracked top eigenvalue (by magnitude, signed) against the
/// dense oracle per slice, with every policy tuned to the same restart
/// budget. Intended to run under the first-order updater.
struct TrackingResult {
    std::string policy;
    double rmse = 0.0;
    int restarts = 0;
};
std::vector<TrackingResult> eigen_tracking(const ExperimentSetup& setup,
                                           const std::vector<RestartPolicy>& policies,
                                           int target_restarts, int cap = kDenseOracleCap);

/// One scalability measurement cell.
struct ScalePoint {
    int n = 0;
    long long edges = 0;
    double monitor_seconds = 0.0;
    double restart_seconds = 0.0;
    long long row_touches = 0;
    long long entry_visits = 0;
    long long loss_visits = 0;
    long long m_s_total = 0;
    long long support_total = 0;
};

/// Runs the identical protocol at geometrically growing sizes (factor 2 per
/// step) starting from `base`; no dense oracle involved.
std::vector<ScalePoint> scalability_probe(const RandomSpec& base, int steps, int T, int k,
                                          std::uint64_t seed, double theta = 0.05);

}  // namespace dynsvd
