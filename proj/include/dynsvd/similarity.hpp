#pragma once

#include <string>

#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// Adjacency-to-similarity transform. Identity keeps S = A; Normalized maps
/// A to D^{-1/2} A D^{-1/2} with d_i = sum_j |A(i,j)| and isolated rows left
/// zero (absolute degrees keep the transform defined on signed graphs).
enum class Similarity { Identity, Normalized };

Similarity similarity_from_name(const std::string& name);
std::string similarity_name(Similarity s);

SymSparseMatrix apply_similarity(Similarity sim, const SymSparseMatrix& a);

/// Similarity change for one slice: Delta S = S(A + dA) - S(A), returned as a
/// sparse delta. For Identity this is dA itself; for Normalized only rows of
/// nodes incident to dA (and their stored neighbors) are re-evaluated.
DeltaMatrix similarity_delta(Similarity sim, const SymSparseMatrix& a_prev,
                             const DeltaMatrix& da, const SymSparseMatrix& s_prev);

}  // namespace dynsvd
