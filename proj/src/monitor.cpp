#include "dynsvd/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "dynsvd/loss.hpp"

namespace dynsvd {

MonitorState MonitorState::anchored(const SymSparseMatrix& s, double loss_at_anchor, int t) {
    MonitorState st;
    st.s_anchor = s;
    st.anchor_loss = loss_at_anchor;
    st.anchor_frob_sq = s.frob_sq();
    st.cum_delta = DeltaMatrix(s.dim());
    st.current_loss = loss_at_anchor;
    st.current_bound = loss_at_anchor;
    st.t_prime = t;
    return st;
}

double delta_tr2(const SymSparseMatrix& s_anchor, const DeltaMatrix& delta) {
    if (s_anchor.dim() != delta.dim()) {
        throw std::invalid_argument("delta_tr2: dimension mismatch");
    }
    double sum = 0.0;
    delta.for_each_canonical([&](int i, int j, double d) {
        const double s = s_anchor.at(i, j);
        const double term = (s + d) * (s + d) - s * s;
        sum += (i == j) ? term : 2.0 * term;
    });
    return sum;
}

Eigen::VectorXd nabla_topk(const NablaOperator& op, int k, const LanczosOptions& opts) {
    if (k < 1 || k > op.full_dim()) {
        throw std::invalid_argument("nabla_topk: k must be in [1, n]");
    }
    const int s = op.support_size();
    const int zeros = op.full_dim() - s;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
    if (s == 0) return out;  // empty delta: the operator is zero

    const int k_sub = std::min(k, s);
    EigPairs sub = lanczos_topk(op, k_sub, EigenOrder::Algebraic, opts);

    // merge the support spectrum with the implicit zeros outside it
    int taken = 0, si = 0, zi = 0;
    while (taken < k) {
        const double cand_sub =
            si < k_sub ? sub.values[si] : -std::numeric_limits<double>::infinity();
        const double cand_zero = zi < zeros ? 0.0 : -std::numeric_limits<double>::infinity();
        if (cand_sub >= cand_zero) {
            out[taken++] = cand_sub;
            ++si;
        } else {
            out[taken++] = cand_zero;
            ++zi;
        }
    }
    return out;
}

double lower_bound(const MonitorState& state, int k, const LanczosOptions& opts,
                   WorkCounters* counters) {
    return lower_bound_with_support(state, k, opts, counters, nullptr);
}

double lower_bound_with_support(const MonitorState& state, int k, const LanczosOptions& opts,
                                WorkCounters* counters, int* support_size) {
    if (state.cum_delta.empty()) {
        if (support_size) *support_size = 0;
        return state.anchor_loss;
    }
    NablaOperator op(state.s_anchor, state.cum_delta);
    const Eigen::VectorXd lam = nabla_topk(op, k, opts);
    if (counters) {
        *counters += op.counters();
        counters->entries_visited += static_cast<long long>(state.cum_delta.stored_count());
    }
    if (support_size) *support_size = op.support_size();
    return state.anchor_loss + delta_tr2(state.s_anchor, state.cum_delta) - lam.sum();
}

double loss_update_delta(double j_prev, const SpectralFactors& f,
                         const SymSparseMatrix& s_prev, const DeltaMatrix& delta,
                         WorkCounters* counters) {
    if (f.dim() != s_prev.dim() || s_prev.dim() != delta.dim()) {
        throw std::invalid_argument("loss_update_delta: dimension mismatch");
    }
    double j = j_prev;
    long long visits = 0;
    delta.for_each_canonical([&](int i, int jj, double d) {
        const double s_old = s_prev.at(i, jj);
        const double s_new = s_old + d;
        if (i == jj) {
            const double r = f.reconstruct_entry(i, i);
            j += (s_new - r) * (s_new - r) - (s_old - r) * (s_old - r);
            ++visits;
        } else {
            const double rij = f.reconstruct_entry(i, jj);
            const double rji = f.reconstruct_entry(jj, i);
            j += (s_new - rij) * (s_new - rij) - (s_old - rij) * (s_old - rij);
            j += (s_new - rji) * (s_new - rji) - (s_old - rji) * (s_old - rji);
            visits += 2;
        }
    });
    if (counters) counters->entries_visited += visits;
    return j < 0.0 ? 0.0 : j;
}

namespace {

bool rows_differ(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int row) {
    return a.row(row) != b.row(row);
}

}  // namespace

double loss_update_rows(double j_prev, const SpectralFactors& f_old,
                        const SpectralFactors& f_new, const std::vector<int>& changed_nodes,
                        const SymSparseMatrix& s, GramCache* cache) {
    const int n = s.dim();
    if (f_old.dim() != n || f_new.dim() != n) {
        throw std::invalid_argument("loss_update_rows: dimension mismatch");
    }
    if (f_old.rank() != f_new.rank()) {
        throw std::invalid_argument("loss_update_rows: rank mismatch");
    }
    const bool sigma_changed = f_old.sigma != f_new.sigma;
    const bool all_rows = static_cast<int>(changed_nodes.size()) >= n;
    if (sigma_changed || all_rows) {
        if (cache) *cache = GramCache::of(f_new);
        return reconstruction_loss(s, f_new);
    }

    std::unordered_set<int> changed_set(changed_nodes.begin(), changed_nodes.end());
    std::vector<int> changed(changed_set.begin(), changed_set.end());
    std::sort(changed.begin(), changed.end());
    for (int i = 0; i < n; ++i) {
        if (!changed_set.count(i) &&
            (rows_differ(f_old.u, f_new.u, i) || rows_differ(f_old.v, f_new.v, i))) {
            throw std::invalid_argument(
                "loss_update_rows: row outside changed_nodes differs between factor sets");
        }
    }

    GramCache local;
    GramCache& g = cache ? *cache : local;
    if (!cache) g = GramCache::of(f_old);

    const Eigen::VectorXd& sig = f_old.sigma;
    const double gram_old = ((sig.asDiagonal() * g.gu * sig.asDiagonal()).cwiseProduct(
                                 g.gv.transpose()))
                                .sum();
    // rank-|C| Gram corrections
    for (int c : changed) {
        g.gu.noalias() += f_new.u.row(c).transpose() * f_new.u.row(c) -
                          f_old.u.row(c).transpose() * f_old.u.row(c);
        g.gv.noalias() += f_new.v.row(c).transpose() * f_new.v.row(c) -
                          f_old.v.row(c).transpose() * f_old.v.row(c);
    }
    const double gram_new = ((sig.asDiagonal() * g.gu * sig.asDiagonal()).cwiseProduct(
                                 g.gv.transpose()))
                                .sum();

    // cross-term corrections: stored positions with a changed row index on
    // either side, each visited once
    auto entry_key = [n](int i, int j) {
        return static_cast<long long>(i) * n + j;
    };
    std::unordered_set<long long> seen;
    double cross_delta = 0.0;
    auto reconstruct = [&](const SpectralFactors& f, int i, int j) {
        return f.reconstruct_entry(i, j);
    };
    for (int c : changed) {
        for (const auto& e : s.row(c)) {
            // position (c, e.col): U row c changed
            if (seen.insert(entry_key(c, e.col)).second) {
                cross_delta += e.w * (reconstruct(f_new, c, e.col) - reconstruct(f_old, c, e.col));
            }
            // mirror position (e.col, c): V row c changed
            if (seen.insert(entry_key(e.col, c)).second) {
                cross_delta += e.w * (reconstruct(f_new, e.col, c) - reconstruct(f_old, e.col, c));
            }
        }
    }

    const double j = j_prev - 2.0 * cross_delta + (gram_new - gram_old);
    return j < 0.0 ? 0.0 : j;
}

}  // namespace dynsvd
