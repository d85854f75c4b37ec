#include "dynsvd/updater.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dynsvd {

SpectralFactors update_hold(const SpectralFactors& f, const DeltaMatrix&) { return f; }

SpectralFactors update_first_order(const SpectralFactors& f, const DeltaMatrix& delta,
                                   double gap_floor) {
    const int k = f.rank();
    const int n = f.dim();
    if (k == 0 || delta.empty()) return f;

    Eigen::VectorXd lam(k);
    for (int l = 0; l < k; ++l) lam[l] = f.signed_value(l);

    // W = D * U, touching delta rows only
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, k);
    for (int i : delta.touched_rows()) {
        for (const auto& e : delta.row(i)) {
            w.row(i) += e.w * f.u.row(e.col);
        }
    }
    const Eigen::MatrixXd c = f.u.transpose() * w;  // c(j,l) = u_j' D u_l

    Eigen::VectorXd lam_new = lam;
    for (int l = 0; l < k; ++l) lam_new[l] += c(l, l);

    Eigen::MatrixXd u_new = f.u;
    if (std::isfinite(gap_floor)) {
        Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(k, k);
        for (int l = 0; l < k; ++l) {
            for (int j = 0; j < k; ++j) {
                if (j == l) continue;
                const double gap = lam[l] - lam[j];
                if (std::abs(gap) < gap_floor) continue;  // degenerate pair skipped
                mix(j, l) = c(j, l) / gap;
            }
        }
        u_new.noalias() += f.u * mix;
        for (int l = 0; l < k; ++l) {
            const double nrm = u_new.col(l).norm();
            if (nrm > 0.0) u_new.col(l) /= nrm;
        }
    }

    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(lam_new[a]) != std::abs(lam_new[b])) {
            return std::abs(lam_new[a]) > std::abs(lam_new[b]);
        }
        return lam_new[a] > lam_new[b];
    });

    SpectralFactors out;
    out.u.resize(n, k);
    out.v.resize(n, k);
    out.sigma.resize(k);
    for (int l = 0; l < k; ++l) {
        const int src = order[static_cast<std::size_t>(l)];
        out.u.col(l) = u_new.col(src);
        out.sigma[l] = std::abs(lam_new[src]);
        out.v.col(l) = (lam_new[src] < 0.0 ? -1.0 : 1.0) * u_new.col(src);
    }
    return out;
}

SpectralFactors apply_updater(const Updater& updater, const SpectralFactors& f,
                              const SymSparseMatrix& s_prev, const DeltaMatrix& delta) {
    (void)s_prev;  // the shipped updaters need only the delta
    if (const auto* fo = std::get_if<FirstOrderUpdater>(&updater)) {
        return update_first_order(f, delta, fo->gap_floor);
    }
    return update_hold(f, delta);
}

bool updater_changes_factors(const Updater& updater) {
    return std::holds_alternative<FirstOrderUpdater>(updater);
}

std::string updater_name(const Updater& updater) {
    return std::holds_alternative<FirstOrderUpdater>(updater) ? "first-order" : "hold";
}

}  // namespace dynsvd
