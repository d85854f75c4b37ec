#include "dynsvd/similarity.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dynsvd {

Similarity similarity_from_name(const std::string& name) {
    if (name == "identity") return Similarity::Identity;
    if (name == "normalized") return Similarity::Normalized;
    throw std::invalid_argument("unknown similarity: " + name);
}

std::string similarity_name(Similarity s) {
    return s == Similarity::Identity ? "identity" : "normalized";
}

SymSparseMatrix apply_similarity(Similarity sim, const SymSparseMatrix& a) {
    if (sim == Similarity::Identity) return a;
    const int n = a.dim();
    std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double d = a.row_abs_sum(i);
        if (d > 0.0) inv_sqrt_deg[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(d);
    }
    SymSparseMatrix s(n);
    a.for_each_canonical([&](int i, int j, double w) {
        const double nw = w * inv_sqrt_deg[static_cast<std::size_t>(i)] *
                          inv_sqrt_deg[static_cast<std::size_t>(j)];
        if (nw != 0.0) s.set(i, j, nw);
    });
    return s;
}

DeltaMatrix similarity_delta(Similarity sim, const SymSparseMatrix& a_prev,
                             const DeltaMatrix& da, const SymSparseMatrix& s_prev) {
    if (a_prev.dim() != da.dim() || a_prev.dim() != s_prev.dim()) {
        throw std::invalid_argument("similarity_delta: dimension mismatch");
    }
    if (sim == Similarity::Identity) return da;

    const int n = a_prev.dim();
    // Rows whose degree changes; every stored position in such a row moves.
    std::vector<int> changed = da.touched_rows();
    std::unordered_set<int> changed_set(changed.begin(), changed.end());

    std::vector<double> new_deg(static_cast<std::size_t>(n), -1.0);
    auto degree_new = [&](int i) {
        double& d = new_deg[static_cast<std::size_t>(i)];
        if (d < 0.0) {
            d = a_prev.row_abs_sum(i);
            for (const auto& e : da.row(i)) {
                d += std::abs(a_prev.at(i, e.col) + e.w) - std::abs(a_prev.at(i, e.col));
            }
        }
        return d;
    };
    auto inv_sqrt = [](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; };

    DeltaMatrix ds(n);
    auto emit = [&](int i, int j) {
        const double a_new = a_prev.at(i, j) + da.at(i, j);
        const double s_new = a_new * inv_sqrt(degree_new(i)) * inv_sqrt(degree_new(j));
        const double diff = s_new - s_prev.at(i, j);
        ds.set(i, j, diff);
    };
    for (int i : changed) {
        // union of old and new stored positions in row i
        for (const auto& e : a_prev.row(i)) {
            if (e.col < i && changed_set.count(e.col)) continue;  // handled from e.col
            emit(i, e.col);
        }
        for (const auto& e : da.row(i)) {
            if (e.col < i && changed_set.count(e.col)) continue;
            if (!a_prev.has(i, e.col)) emit(i, e.col);
        }
    }
    return ds;
}

}  // namespace dynsvd
