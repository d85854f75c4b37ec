#include "dynsvd/nabla.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynsvd {

NablaOperator::NablaOperator(const SymSparseMatrix& s_anchor, const DeltaMatrix& delta)
    : s_(s_anchor), delta_(delta) {
    if (s_.dim() != delta_.dim()) {
        throw std::invalid_argument("NablaOperator: dimension mismatch");
    }
    delta_rows_ = delta_.touched_rows();
    std::vector<char> in_support(static_cast<std::size_t>(s_.dim()), 0);
    for (int i : delta_rows_) {
        in_support[static_cast<std::size_t>(i)] = 1;
        for (const auto& e : s_.row(i)) in_support[static_cast<std::size_t>(e.col)] = 1;
    }
    pos_in_support_.assign(static_cast<std::size_t>(s_.dim()), -1);
    for (int i = 0; i < s_.dim(); ++i) {
        if (in_support[static_cast<std::size_t>(i)]) {
            pos_in_support_[static_cast<std::size_t>(i)] = static_cast<int>(support_.size());
            support_.push_back(i);
        }
    }
    // ||nabla||_2 <= 2 ||S|| ||D|| + ||D||^2, evaluated with Frobenius norms.
    const double sn = std::sqrt(s_.frob_sq());
    const double dn = std::sqrt(delta_.frob_sq());
    scale_ = 2.0 * sn * dn + dn * dn;
    dz_.assign(static_cast<std::size_t>(s_.dim()), 0.0);
    sw_.assign(static_cast<std::size_t>(s_.dim()), 0.0);
}

void NablaOperator::apply(const double* x, double* y) const {
    long long entries = 0;
    // dz = D * x, supported on delta rows
    for (int i : delta_rows_) {
        double acc = 0.0;
        for (const auto& e : delta_.row(i)) {
            acc += e.w * x[pos_in_support_[static_cast<std::size_t>(e.col)]];
            ++entries;
        }
        dz_[static_cast<std::size_t>(i)] = acc;
    }
    // sw = S * x evaluated on delta rows only (all D columns live there)
    for (int i : delta_rows_) {
        double acc = 0.0;
        for (const auto& e : s_.row(i)) {
            acc += e.w * x[pos_in_support_[static_cast<std::size_t>(e.col)]];
            ++entries;
        }
        sw_[static_cast<std::size_t>(i)] = acc;
    }
    const int m = dim();
    std::fill(y, y + m, 0.0);
    // y += S * dz (dz supported on delta rows; S is symmetric, scatter by column)
    for (int l : delta_rows_) {
        const double zl = dz_[static_cast<std::size_t>(l)];
        if (zl == 0.0) {
            continue;
        }
        for (const auto& e : s_.row(l)) {
            y[pos_in_support_[static_cast<std::size_t>(e.col)]] += e.w * zl;
            ++entries;
        }
    }
    // y += D * sw + D * dz
    for (int i : delta_rows_) {
        double acc = 0.0;
        for (const auto& e : delta_.row(i)) {
            acc += e.w * (sw_[static_cast<std::size_t>(e.col)] +
                          dz_[static_cast<std::size_t>(e.col)]);
            ++entries;
        }
        y[pos_in_support_[static_cast<std::size_t>(i)]] += acc;
    }
    counters_.rows_touched += m;
    counters_.entries_visited += entries;
    entries_per_apply_ = entries;
}

}  // namespace dynsvd
