#pragma once

#include <Eigen/Dense>

#include "dynsvd/factors.hpp"
#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// Minimum achievable rank-k reconstruction loss given the cached squared
/// Frobenius norm and the top-k eigenvalues by magnitude:
/// frob_sq - sum_l values[l]^2, clamped at zero. O(M + k) overall since
/// frob_sq is cached.
double min_loss(double frob_sq, const Eigen::VectorXd& topk_values);

/// ||S - U Sigma V^T||_F^2 without materializing the reconstruction:
/// ||S||_F^2 - 2 tr(S^T U Sigma V^T) + ||U Sigma V^T||_F^2, where the trace
/// runs over stored entries of S only and the last term uses the k x k Gram
/// matrices of U and V.
double reconstruction_loss(const SymSparseMatrix& s, const SpectralFactors& f);

/// Gram term ||U Sigma V^T||_F^2 = tr(Sigma U^T U Sigma V^T V).
double factor_gram_norm_sq(const SpectralFactors& f);

}  // namespace dynsvd
