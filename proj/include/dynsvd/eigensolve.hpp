#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// Eigenvalue ordering. The two modes are not interchangeable: truncation
/// loss needs the largest squared eigenvalues (Magnitude), while the
/// perturbation bound needs the largest algebraic eigenvalue sum (Algebraic).
enum class EigenOrder { Magnitude, Algebraic };

struct EigPairs {
    Eigen::VectorXd values;   // signed, descending under the requested order
    Eigen::MatrixXd vectors;  // n x k, orthonormal columns
};

/// Symmetric operator interface for the iterative solver.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual int dim() const = 0;
    virtual void apply(const double* x, double* y) const = 0;
    /// Norm proxy used to scale residual tolerances.
    virtual double scale_hint() const = 0;
};

struct LanczosOptions {
    double tol = 1e-9;       // residual <= tol * scale_hint per pair
    int iter_cap = 0;        // matvec budget per pass; 0 means 10*k + 100
    std::uint64_t seed = 0x5eedULL;
};

class EigsFailure : public std::runtime_error {
public:
    EigsFailure(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Top-k eigenpairs of an implicit symmetric operator.
///
/// Lanczos with full reorthogonalization. Converged pairs are locked and
/// deflated; after k pairs are held, extra probe passes on the orthogonal
/// complement run until the complement's best value can no longer displace
/// the current k-th (this is what catches repeated eigenvalues that a single
/// Krylov sequence sees only once).
EigPairs lanczos_topk(const LinearOperator& op, int k, EigenOrder order,
                      const LanczosOptions& opts = {});

/// Top-k eigenpairs of a sparse symmetric matrix. Throws std::invalid_argument
/// for k outside [1, n] or a zero matrix; EigsFailure on non-convergence.
EigPairs topk_eigs(const SymSparseMatrix& m, int k,
                   EigenOrder order = EigenOrder::Magnitude,
                   const LanczosOptions& opts = {});

struct DenseEigs {
    Eigen::VectorXd values;   // ascending algebraic (solver-native)
    Eigen::MatrixXd vectors;
};

inline constexpr int kDenseOracleCap = 2000;

/// Full spectrum of a dense symmetric matrix; the ground-truth reference for
/// everything iterative. Dimension above `cap` is an argument error.
DenseEigs dense_eigs_oracle(const Eigen::MatrixXd& m, int cap = kDenseOracleCap);

/// Indices of the top-k entries of `values` under `order`, descending.
/// Magnitude ties prefer the positive value, then the lower index.
std::vector<int> top_k_indices(const Eigen::VectorXd& values, int k, EigenOrder order);

/// Convenience: top-k values of a dense symmetric matrix under `order`.
Eigen::VectorXd dense_topk_values(const Eigen::MatrixXd& m, int k, EigenOrder order);

}  // namespace dynsvd
