#pragma once

#include <cstdint>
#include <vector>

#include "dynsvd/eigensolve.hpp"
#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// Work counters for the locality instrumentation: rows a matvec writes into
/// and matrix entries it reads.
struct WorkCounters {
    long long rows_touched = 0;
    long long entries_visited = 0;

    void reset() { rows_touched = entries_visited = 0; }
    WorkCounters& operator+=(const WorkCounters& o) {
        rows_touched += o.rows_touched;
        entries_visited += o.entries_visited;
        return *this;
    }
};

/// Implicit perturbation operator S*D + D*S + D*D for symmetric S (the
/// anchor matrix) and D (the accumulated change since the anchor).
///
/// The operator is evaluated with three sparse half-products restricted to
/// the support subspace: rows of D plus their stored neighbors in S. Vectors
/// passed to apply() live in compressed support coordinates, so one matvec
/// costs O(M_S + M_L) regardless of the full dimension.
class NablaOperator final : public LinearOperator {
public:
    // Holds views; both matrices must outlive the operator.
    NablaOperator(const SymSparseMatrix& s_anchor, const DeltaMatrix& delta);
    NablaOperator(SymSparseMatrix&&, const DeltaMatrix&) = delete;
    NablaOperator(const SymSparseMatrix&, DeltaMatrix&&) = delete;
    NablaOperator(SymSparseMatrix&&, DeltaMatrix&&) = delete;

    int dim() const override { return static_cast<int>(support_.size()); }
    void apply(const double* x, double* y) const override;
    double scale_hint() const override { return scale_; }

    int full_dim() const { return s_.dim(); }
    const std::vector<int>& support() const { return support_; }
    int support_size() const { return static_cast<int>(support_.size()); }

    /// Counters accumulated over every apply() since construction/reset.
    const WorkCounters& counters() const { return counters_; }
    void reset_counters() { counters_.reset(); }

    /// Entries one matvec visits; the measured stand-in for M_L.
    long long entries_per_apply() const { return entries_per_apply_; }

private:
    const SymSparseMatrix& s_;
    const DeltaMatrix& delta_;
    std::vector<int> support_;          // sorted
    std::vector<int> delta_rows_;       // rows with stored delta entries
    std::vector<int> pos_in_support_;   // full index -> compressed, -1 outside
    double scale_ = 0.0;
    mutable WorkCounters counters_;
    mutable long long entries_per_apply_ = 0;
    mutable std::vector<double> dz_, sw_;  // scratch, indexed by full dimension
};

}  // namespace dynsvd
