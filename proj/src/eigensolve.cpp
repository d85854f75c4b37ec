#include "dynsvd/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dynsvd/rng.hpp"

namespace dynsvd {

namespace {

double order_key(double v, EigenOrder order) {
    return order == EigenOrder::Algebraic ? v : std::abs(v);
}

// Ritz pairs a pass must have converged before it may stop. For magnitude
// ordering the algebraic extremes are added whenever they are competitive,
// since the largest-magnitude eigenvalue always sits at one of the ends.
std::vector<int> criterion_indices(const Eigen::VectorXd& theta, int want, EigenOrder order) {
    const int m = static_cast<int>(theta.size());
    std::vector<int> idx;
    if (order == EigenOrder::Algebraic) {
        for (int i = std::max(0, m - want); i < m; ++i) idx.push_back(i);
        return idx;
    }
    std::vector<int> by_mag(static_cast<std::size_t>(m));
    std::iota(by_mag.begin(), by_mag.end(), 0);
    std::stable_sort(by_mag.begin(), by_mag.end(), [&](int a, int b) {
        return std::abs(theta[a]) > std::abs(theta[b]);
    });
    const int w = std::min(want, m);
    idx.assign(by_mag.begin(), by_mag.begin() + w);
    const double cut = std::abs(theta[idx.back()]);
    for (int end : {0, m - 1}) {
        if (std::abs(theta[end]) >= 0.5 * cut &&
            std::find(idx.begin(), idx.end(), end) == idx.end()) {
            idx.push_back(end);
        }
    }
    return idx;
}

struct PassResult {
    std::vector<double> values;                // locked this pass (top-want, converged)
    std::vector<Eigen::VectorXd> vectors;
    std::vector<double> wanted_residuals;      // residuals of the wanted set at exit
    std::vector<double> all_converged_values;  // every converged Ritz value seen at exit
    bool complement_empty = false;
    bool resolved_all = false;  // pass tridiagonalized the entire complement
    bool converged = false;
    int iters = 0;
};

// One deflated Lanczos pass over the orthogonal complement of `locked`.
PassResult run_pass(const LinearOperator& op, const Eigen::MatrixXd& locked, int nlocked,
                    int want, EigenOrder order, double tol_abs, double brk_tol, int budget,
                    CounterRng& rng) {
    PassResult out;
    const int n = op.dim();
    const int comp_dim = n - nlocked;
    const int mcap = std::min(comp_dim, budget);
    if (mcap <= 0) {
        out.complement_empty = true;
        return out;
    }

    auto locked_block = locked.leftCols(nlocked);
    auto deflate = [&](Eigen::VectorXd& z) {
        if (nlocked > 0) z.noalias() -= locked_block * (locked_block.transpose() * z);
    };

    Eigen::VectorXd start(n);
    double nrm = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        for (int i = 0; i < n; ++i) start[i] = rng.next_symmetric();
        deflate(start);
        deflate(start);
        nrm = start.norm();
        if (nrm > 1e-8 * std::sqrt(static_cast<double>(n))) break;
    }
    if (nrm <= 1e-12) {
        out.complement_empty = true;
        return out;
    }

    Eigen::MatrixXd q(n, mcap);
    q.col(0) = start / nrm;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(mcap);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(mcap);
    Eigen::VectorXd z(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
    int next_check = std::min(mcap, std::max(2, want + 2));

    for (int j = 0; j < mcap; ++j) {
        op.apply(q.col(j).data(), z.data());
        ++out.iters;
        deflate(z);
        alpha[j] = q.col(j).dot(z);
        z.noalias() -= alpha[j] * q.col(j);
        if (j > 0) z.noalias() -= beta[j - 1] * q.col(j - 1);
        // full reorthogonalization, two sweeps
        auto basis = q.leftCols(j + 1);
        z.noalias() -= basis * (basis.transpose() * z);
        z.noalias() -= basis * (basis.transpose() * z);
        deflate(z);
        beta[j] = z.norm();

        const bool breakdown = beta[j] <= brk_tol;
        const bool last = breakdown || j + 1 == mcap;
        if (last || j + 1 >= next_check) {
            const int m = j + 1;
            next_check = std::min(mcap, m + std::max(8, m / 4));
            small.computeFromTridiagonal(alpha.head(m), beta.head(std::max(0, m - 1)),
                                         Eigen::ComputeEigenvectors);
            const Eigen::VectorXd& theta = small.eigenvalues();  // ascending
            const Eigen::MatrixXd& y = small.eigenvectors();
            auto resid_of = [&](int i) { return std::abs(beta[j] * y(m - 1, i)); };

            std::vector<int> crit = criterion_indices(theta, want, order);
            bool ok = m >= std::min(mcap, want + 2) || breakdown;
            out.wanted_residuals.clear();
            for (int i : crit) {
                const double r = resid_of(i);
                out.wanted_residuals.push_back(r);
                if (r > tol_abs) ok = false;
            }

            if (ok || last) {
                out.all_converged_values.clear();
                std::vector<int> conv;
                for (int i = 0; i < m; ++i) {
                    if (resid_of(i) <= tol_abs) {
                        conv.push_back(i);
                        out.all_converged_values.push_back(theta[i]);
                    }
                }
                std::stable_sort(conv.begin(), conv.end(), [&](int a, int b) {
                    return order_key(theta[a], order) > order_key(theta[b], order);
                });
                const int take = std::min<int>(want, static_cast<int>(conv.size()));
                for (int t = 0; t < take; ++t) {
                    const int i = conv[static_cast<std::size_t>(t)];
                    Eigen::VectorXd v = q.leftCols(m) * y.col(i);
                    deflate(v);
                    const double vn = v.norm();
                    if (vn > 0.0) v /= vn;
                    out.values.push_back(theta[i]);
                    out.vectors.push_back(std::move(v));
                }
                out.converged = ok && take == std::min(want, m);
                out.resolved_all =
                    breakdown && m == comp_dim && conv.size() == static_cast<std::size_t>(m);
                return out;
            }
        }
        if (breakdown) break;
        q.col(j + 1) = z / beta[j];
    }
    return out;
}

class SparseMatrixOperator final : public LinearOperator {
public:
    explicit SparseMatrixOperator(const SymSparseMatrix& m) : m_(m) {}
    int dim() const override { return m_.dim(); }
    void apply(const double* x, double* y) const override { m_.matvec(x, y); }
    double scale_hint() const override { return std::sqrt(m_.frob_sq()); }

private:
    const SymSparseMatrix& m_;
};

}  // namespace

EigPairs lanczos_topk(const LinearOperator& op, int k, EigenOrder order,
                      const LanczosOptions& opts) {
    const int n = op.dim();
    if (k < 1 || k > n) {
        throw std::invalid_argument("lanczos_topk: k must be in [1, dim]");
    }
    const double scale = std::max(op.scale_hint(), 1e-300);
    const double tol_abs = opts.tol * scale;
    const double brk_tol = std::max(1e-14 * scale, 1e-300);
    const double tie_tol = std::max(opts.tol, 1e-10) * scale;
    const int budget = opts.iter_cap > 0 ? opts.iter_cap : 10 * k + 100;
    const int max_passes = 2 * k + 8;

    Eigen::MatrixXd locked(n, std::min(n, k + max_passes + 1));
    std::vector<double> locked_vals;
    CounterRng rng(opts.seed);

    auto kth_key = [&]() {
        std::vector<double> keys;
        keys.reserve(locked_vals.size());
        for (double v : locked_vals) keys.push_back(order_key(v, order));
        std::sort(keys.begin(), keys.end(), std::greater<>());
        return keys[static_cast<std::size_t>(k - 1)];
    };

    int passes = 0;
    while (static_cast<int>(locked_vals.size()) < n) {
        const int nlocked = static_cast<int>(locked_vals.size());
        const bool probing = nlocked >= k;
        const int want = probing ? 1 : k - nlocked;
        if (++passes > max_passes) {
            throw EigsFailure("lanczos_topk: pass limit reached before convergence", {});
        }

        PassResult pr = run_pass(op, locked, nlocked, want, order, tol_abs, brk_tol, budget, rng);
        if (pr.complement_empty) break;
        if (pr.values.empty()) {
            throw EigsFailure("lanczos_topk: no Ritz pair converged within the iteration cap",
                              pr.wanted_residuals);
        }

        const double kth_before = probing ? kth_key() : 0.0;
        for (std::size_t t = 0; t < pr.values.size(); ++t) {
            locked.col(static_cast<int>(locked_vals.size())) = pr.vectors[t];
            locked_vals.push_back(pr.values[t]);
            if (static_cast<int>(locked_vals.size()) == locked.cols()) break;
        }

        if (probing) {
            double best_new = order_key(pr.values.front(), order);
            for (double v : pr.values) best_new = std::max(best_new, order_key(v, order));
            if (best_new <= kth_before + tie_tol) break;  // complement cannot displace
            continue;
        }
        if (pr.resolved_all && static_cast<int>(locked_vals.size()) >= k) {
            // Pass saw the complete complement spectrum; check the best value
            // it did not lock against the current k-th.
            std::vector<double> rest = pr.all_converged_values;
            std::sort(rest.begin(), rest.end(), [&](double a, double b) {
                return order_key(a, order) > order_key(b, order);
            });
            if (rest.size() <= pr.values.size()) break;
            const double best_unlocked = order_key(rest[pr.values.size()], order);
            if (best_unlocked <= kth_key() + tie_tol) break;
        }
    }

    if (static_cast<int>(locked_vals.size()) < k) {
        throw EigsFailure("lanczos_topk: subspace exhausted before k pairs were found", {});
    }

    std::vector<int> sel(locked_vals.size());
    std::iota(sel.begin(), sel.end(), 0);
    std::stable_sort(sel.begin(), sel.end(), [&](int a, int b) {
        const double ka = order_key(locked_vals[static_cast<std::size_t>(a)], order);
        const double kb = order_key(locked_vals[static_cast<std::size_t>(b)], order);
        if (ka != kb) return ka > kb;
        return locked_vals[static_cast<std::size_t>(a)] >
               locked_vals[static_cast<std::size_t>(b)];
    });

    EigPairs out;
    out.values.resize(k);
    out.vectors.resize(n, k);
    for (int i = 0; i < k; ++i) {
        out.values[i] = locked_vals[static_cast<std::size_t>(sel[static_cast<std::size_t>(i)])];
        out.vectors.col(i) = locked.col(sel[static_cast<std::size_t>(i)]);
    }
    return out;
}

EigPairs topk_eigs(const SymSparseMatrix& m, int k, EigenOrder order,
                   const LanczosOptions& opts) {
    if (k < 1 || k > m.dim()) {
        throw std::invalid_argument("topk_eigs: k must be in [1, n]");
    }
    if (m.empty()) {
        throw std::invalid_argument("topk_eigs: matrix has no stored entries");
    }
    SparseMatrixOperator op(m);
    return lanczos_topk(op, k, order, opts);
}

DenseEigs dense_eigs_oracle(const Eigen::MatrixXd& m, int cap) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("dense_eigs_oracle: matrix must be square");
    }
    if (m.rows() > cap) {
        throw std::invalid_argument("dense_eigs_oracle: dimension exceeds the dense cap");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw EigsFailure("dense_eigs_oracle: eigensolver failed", {});
    }
    return DenseEigs{es.eigenvalues(), es.eigenvectors()};
}

std::vector<int> top_k_indices(const Eigen::VectorXd& values, int k, EigenOrder order) {
    if (k < 0 || k > values.size()) {
        throw std::invalid_argument("top_k_indices: k out of range");
    }
    std::vector<int> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double ka = order_key(values[a], order);
        const double kb = order_key(values[b], order);
        if (ka != kb) return ka > kb;
        if (values[a] != values[b]) return values[a] > values[b];  // positive first
        return a < b;
    });
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

Eigen::VectorXd dense_topk_values(const Eigen::MatrixXd& m, int k, EigenOrder order) {
    DenseEigs es = dense_eigs_oracle(m);
    std::vector<int> idx = top_k_indices(es.values, k, order);
    Eigen::VectorXd out(k);
    for (int i = 0; i < k; ++i) out[i] = es.values[idx[static_cast<std::size_t>(i)]];
    return out;
}

}  // namespace dynsvd
