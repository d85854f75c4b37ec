#include "dynsvd/loss.hpp"

#include <stdexcept>

namespace dynsvd {

double min_loss(double frob_sq, const Eigen::VectorXd& topk_values) {
    const double loss = frob_sq - topk_values.squaredNorm();
    return loss < 0.0 ? 0.0 : loss;
}

double factor_gram_norm_sq(const SpectralFactors& f) {
    if (f.rank() == 0) return 0.0;
    // tr(Sigma U^T U Sigma * V^T V)
    const Eigen::MatrixXd us = f.u * f.sigma.asDiagonal();
    const Eigen::MatrixXd gu_s = us.transpose() * us;
    const Eigen::MatrixXd gv = f.v.transpose() * f.v;
    return gu_s.cwiseProduct(gv.transpose()).sum();
}

double reconstruction_loss(const SymSparseMatrix& s, const SpectralFactors& f) {
    if (f.dim() != s.dim()) {
        throw std::invalid_argument("reconstruction_loss: dimension mismatch");
    }
    double cross = 0.0;
    s.for_each_canonical([&](int i, int j, double w) {
        if (i == j) {
            cross += w * f.reconstruct_entry(i, i);
        } else {
            cross += w * (f.reconstruct_entry(i, j) + f.reconstruct_entry(j, i));
        }
    });
    const double loss = s.frob_sq() - 2.0 * cross + factor_gram_norm_sq(f);
    return loss < 0.0 ? 0.0 : loss;
}

}  // namespace dynsvd
