#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace dynsvd {

/// Symmetric sparse matrix over a fixed node universe [0, n).
///
/// Storage is per-row sorted adjacency lists plus a hash index, so entry
/// lookup is O(1) expected and a row scan is O(d_i). Off-diagonal entries are
/// stored in both orientations; zero weights are never stored (an update that
/// lands on exact zero removes the position). The squared Frobenius norm is
/// maintained incrementally under every mutation with compensated summation.
class SymSparseMatrix {
public:
    struct Entry {
        int col;
        double w;
    };

    SymSparseMatrix() = default;
    explicit SymSparseMatrix(int n) : n_(n), rows_(static_cast<std::size_t>(n)) {}

    int dim() const { return n_; }

    /// Number of stored positions; off-diagonal pairs count twice,
    /// matching the matrix-element counts M and M_S.
    std::size_t stored_count() const { return index_.size(); }
    bool empty() const { return index_.empty(); }

    double at(int i, int j) const {
        auto it = index_.find(key(i, j));
        return it == index_.end() ? 0.0 : it->second;
    }
    bool has(int i, int j) const { return index_.count(key(i, j)) != 0; }

    /// Adds w to the symmetric pair (i,j)/(j,i); exact-zero results are erased.
    void add(int i, int j, double w) { set(i, j, at(i, j) + w); }

    /// Sets the symmetric pair to w; w == 0 erases the position.
    void set(int i, int j, double w);

    /// this += factor * other (entrywise, coalescing).
    void add_scaled(const SymSparseMatrix& other, double factor = 1.0);

    double frob_sq() const { return frob_sq_ < 0.0 ? 0.0 : frob_sq_; }

    /// From-scratch recomputation, for diagnostics and cache validation.
    double recompute_frob_sq() const;

    const std::vector<Entry>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

    /// Weighted degree sum_j |A(i,j)|, well-defined for signed weights.
    double row_abs_sum(int i) const;

    /// y = A*x over the full dimension.
    void matvec(const double* x, double* y) const;

    /// Rows holding at least one stored entry, ascending.
    std::vector<int> touched_rows() const;

    /// Visits each canonical position once (i <= j).
    template <typename F>
    void for_each_canonical(F&& f) const {
        for (int i = 0; i < n_; ++i) {
            for (const Entry& e : rows_[static_cast<std::size_t>(i)]) {
                if (e.col >= i) f(i, e.col, e.w);
            }
        }
    }

private:
    static std::uint64_t key(int i, int j) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
    }

    void set_directed(int i, int j, double w);

    int n_ = 0;
    std::vector<std::vector<Entry>> rows_;
    std::unordered_map<std::uint64_t, double> index_;
    double frob_sq_ = 0.0;
    double frob_comp_ = 0.0;  // Kahan compensation term
};

/// Sparse symmetric change of a matrix across one time slice. Shares the
/// matrix representation; weights may be negative (deletion = negated current
/// weight) and stored_count() is the changed-element count M_S.
using DeltaMatrix = SymSparseMatrix;

}  // namespace dynsvd
