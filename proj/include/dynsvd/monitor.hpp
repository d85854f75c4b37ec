#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dynsvd/factors.hpp"
#include "dynsvd/nabla.hpp"
#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// Monitoring state anchored at the last full decomposition (slice t').
/// cum_delta accumulates S_t - S_{t'} (coalesced, not per-slice), so the
/// bound always perturbs from the anchor.
struct MonitorState {
    SymSparseMatrix s_anchor;   // S_{t'}
    double anchor_loss = 0.0;   // minimum loss at the anchor
    double anchor_frob_sq = 0.0;
    DeltaMatrix cum_delta;
    double current_loss = 0.0;   // J(t)
    double current_bound = 0.0;  // B(t)
    int t_prime = 0;

    static MonitorState anchored(const SymSparseMatrix& s, double loss_at_anchor, int t);
};

/// Trace-square change sum over the stored positions of `delta` only:
/// sum_(i,j) [(S+D)(i,j)^2 - S(i,j)^2]. Equals ||S+D||_F^2 - ||S||_F^2.
double delta_tr2(const SymSparseMatrix& s_anchor, const DeltaMatrix& delta);

/// Top-k eigenvalues of the full-dimension perturbation operator in
/// descending algebraic order. The iteration runs on the support subspace;
/// the (n - support) zero eigenvalues the full operator carries outside it
/// are merged in before the top-k are taken.
Eigen::VectorXd nabla_topk(const NablaOperator& op, int k, const LanczosOptions& opts = {});

/// Lower bound on the minimum loss at the current slice (anchor loss +
/// delta_tr2 - top-k algebraic eigenvalue sum of the perturbation operator).
/// May be non-positive for large perturbations; callers treat that as a
/// vacuous bound. Counter instrumentation is added to `counters` when given.
double lower_bound(const MonitorState& state, int k, const LanczosOptions& opts = {},
                   WorkCounters* counters = nullptr);

/// Same, also reporting the perturbation operator's support size (N_L).
double lower_bound_with_support(const MonitorState& state, int k, const LanczosOptions& opts,
                                WorkCounters* counters, int* support_size);

/// Loss after applying `delta` to s_prev while keeping factors fixed:
/// per stored position the residual term is swapped in O(k). Returns the new
/// J given the old one. O(k * M_S).
double loss_update_delta(double j_prev, const SpectralFactors& f,
                         const SymSparseMatrix& s_prev, const DeltaMatrix& delta,
                         WorkCounters* counters = nullptr);

/// Cached k x k Gram matrices for the row-update path.
struct GramCache {
    Eigen::MatrixXd gu, gv;
    static GramCache of(const SpectralFactors& f) {
        return GramCache{f.u.transpose() * f.u, f.v.transpose() * f.v};
    }
};

/// Loss after replacing factor rows listed in `changed_nodes` (f_old ->
/// f_new), re-evaluating only terms that involve changed rows. A sigma
/// change or a full changed set degrades to a fresh recomputation. Rows
/// outside `changed_nodes` must be identical in f_old and f_new. When a
/// GramCache is supplied it is updated in place and the call is
/// O(sum_i (k d_i + k^2)); otherwise the Grams are rebuilt.
double loss_update_rows(double j_prev, const SpectralFactors& f_old,
                        const SpectralFactors& f_new, const std::vector<int>& changed_nodes,
                        const SymSparseMatrix& s, GramCache* cache = nullptr);

}  // namespace dynsvd
