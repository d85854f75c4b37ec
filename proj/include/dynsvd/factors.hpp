#pragma once

#include <Eigen/Dense>

#include "dynsvd/eigensolve.hpp"

namespace dynsvd {

/// Truncated factor triple (U, Sigma, V) of a symmetric matrix.
///
/// Sigma is non-negative; the sign of eigenvalue l is carried by the V column,
/// v(:,l) = sign(lambda_l) * u(:,l), so U * Sigma * V^T reconstructs the
/// signed matrix. Columns are orthonormal right after a fresh decomposition
/// and may degrade under incremental updates; reconstruction stays
/// well-defined either way.
struct SpectralFactors {
    Eigen::MatrixXd u;       // n x k
    Eigen::VectorXd sigma;   // k, non-negative, descending
    Eigen::MatrixXd v;       // n x k

    int dim() const { return static_cast<int>(u.rows()); }
    int rank() const { return static_cast<int>(sigma.size()); }

    /// Signed eigenvalue estimate for column l (sign read off the u/v alignment).
    double signed_value(int l) const {
        const double s = u.col(l).dot(v.col(l));
        return s < 0.0 ? -sigma[l] : sigma[l];
    }

    /// Entry (i, j) of U * Sigma * V^T in O(k).
    double reconstruct_entry(int i, int j) const {
        double r = 0.0;
        for (int l = 0; l < rank(); ++l) r += u(i, l) * sigma[l] * v(j, l);
        return r;
    }

    static SpectralFactors zero(int n, int k) {
        return SpectralFactors{Eigen::MatrixXd::Zero(n, k), Eigen::VectorXd::Zero(k),
                               Eigen::MatrixXd::Zero(n, k)};
    }

    /// Builds factors from signed eigenpairs (values ordered by caller).
    static SpectralFactors from_eigs(const EigPairs& pairs);
};

}  // namespace dynsvd
