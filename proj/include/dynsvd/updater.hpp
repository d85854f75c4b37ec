#pragma once

#include <string>
#include <variant>

#include "dynsvd/factors.hpp"
#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// Keeps the factors frozen between restarts.
struct HoldUpdater {};

/// First-order symmetric eigen-perturbation of the tracked pairs:
///   lambda_l += u_l' D u_l
///   u_l      += sum_{j != l} (u_j' D u_l) / (lambda_l - lambda_j) u_j
/// Terms with an eigen-gap below gap_floor are skipped; an infinite
/// gap_floor updates eigenvalues only. Columns are renormalized and
/// re-sorted by magnitude afterwards.
struct FirstOrderUpdater {
    double gap_floor = 1e-6;
};

using Updater = std::variant<HoldUpdater, FirstOrderUpdater>;

SpectralFactors update_hold(const SpectralFactors& f, const DeltaMatrix& delta);

SpectralFactors update_first_order(const SpectralFactors& f, const DeltaMatrix& delta,
                                   double gap_floor);

/// Dispatches per Eq-style updater signature F(factors, S_prev, delta).
SpectralFactors apply_updater(const Updater& updater, const SpectralFactors& f,
                              const SymSparseMatrix& s_prev, const DeltaMatrix& delta);

bool updater_changes_factors(const Updater& updater);
std::string updater_name(const Updater& updater);

}  // namespace dynsvd
