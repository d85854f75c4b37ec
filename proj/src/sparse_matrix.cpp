#include "dynsvd/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynsvd {

void SymSparseMatrix::set(int i, int j, double w) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
        throw std::invalid_argument("SymSparseMatrix::set: index out of range");
    }
    const double old = at(i, j);
    if (old == w) return;

    // Kahan update of the Frobenius cache; off-diagonal positions carry
    // their mirror's weight as well.
    const double mult = (i == j) ? 1.0 : 2.0;
    const double delta = mult * (w * w - old * old);
    const double y = delta - frob_comp_;
    const double t = frob_sq_ + y;
    frob_comp_ = (t - frob_sq_) - y;
    frob_sq_ = t;

    set_directed(i, j, w);
    if (i != j) set_directed(j, i, w);
}

void SymSparseMatrix::set_directed(int i, int j, double w) {
    auto& r = rows_[static_cast<std::size_t>(i)];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Entry& e, int col) { return e.col < col; });
    if (w == 0.0) {
        if (it != r.end() && it->col == j) r.erase(it);
        index_.erase(key(i, j));
        return;
    }
    if (it != r.end() && it->col == j) {
        it->w = w;
    } else {
        r.insert(it, Entry{j, w});
    }
    index_[key(i, j)] = w;
}

void SymSparseMatrix::add_scaled(const SymSparseMatrix& other, double factor) {
    if (other.dim() != n_) {
        throw std::invalid_argument("SymSparseMatrix::add_scaled: dimension mismatch");
    }
    other.for_each_canonical([&](int i, int j, double w) { add(i, j, factor * w); });
}

double SymSparseMatrix::recompute_frob_sq() const {
    double sum = 0.0, comp = 0.0;
    for (const auto& r : rows_) {
        for (const Entry& e : r) {
            const double y = e.w * e.w - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return sum;
}

double SymSparseMatrix::row_abs_sum(int i) const {
    double d = 0.0;
    for (const Entry& e : rows_[static_cast<std::size_t>(i)]) d += std::abs(e.w);
    return d;
}

void SymSparseMatrix::matvec(const double* x, double* y) const {
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (const Entry& e : rows_[static_cast<std::size_t>(i)]) {
            acc += e.w * x[e.col];
        }
        y[i] = acc;
    }
}

std::vector<int> SymSparseMatrix::touched_rows() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i) {
        if (!rows_[static_cast<std::size_t>(i)].empty()) out.push_back(i);
    }
    return out;
}

}  // namespace dynsvd
