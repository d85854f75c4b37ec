#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dynsvd/sparse_matrix.hpp"

namespace dynsvd {

/// One weighted edge change. Deleting an edge is an event whose weight is the
/// negative of the current weight.
struct EdgeEvent {
    int u = 0;
    int v = 0;
    double w = 1.0;
    double ts = 0.0;
};

struct LoadResult {
    std::vector<EdgeEvent> events;
    std::vector<std::string> warnings;
};

/// Parses an edge-list file: one event per line, `u v [w] [ts]`,
/// whitespace-separated, `#` starts a comment line. Missing w defaults to 1,
/// missing ts to the physical line number. Parse failures throw
/// std::runtime_error naming the line; non-monotone timestamps produce a
/// warning and keep file order.
LoadResult load_events(const std::string& path);

/// 1 + the largest node id referenced (0 for an empty list).
int node_count(const std::vector<EdgeEvent>& events);

/// Accumulates the earliest ceil(static_fraction * count) events (capped so
/// at least one event stays evolving) into the static matrix; returns the
/// rest in order. Duplicate positions accumulate additively.
std::pair<SymSparseMatrix, std::vector<EdgeEvent>> split_static_evolving(
    const std::vector<EdgeEvent>& events, double static_fraction, int n);

enum class SlicingMode { EqualEdges, EqualTime };

SlicingMode slicing_mode_from_name(const std::string& name);
std::string slicing_mode_name(SlicingMode m);

/// Ordered sequence of per-slice deltas over a fixed node universe.
struct SliceStream {
    std::vector<DeltaMatrix> slices;
    SlicingMode mode = SlicingMode::EqualEdges;
    int n = 0;

    int T() const { return static_cast<int>(slices.size()); }
    long long total_changes() const {
        long long c = 0;
        for (const auto& d : slices) c += static_cast<long long>(d.stored_count()) ;
        return c;
    }
};

/// Splits events into exactly T slices. EqualEdges packs contiguous blocks of
/// ceil(count / T) events (the tail may be short); EqualTime partitions the
/// timestamp range into T equal intervals (empty slices allowed). Events on
/// the same position inside a slice coalesce additively; exact cancellation
/// removes the entry.
SliceStream slice_events(const std::vector<EdgeEvent>& events, int T, SlicingMode mode, int n);

/// Applies every slice in order: a0 + sum of slices.
SymSparseMatrix apply_stream(const SymSparseMatrix& a0, const SliceStream& stream);

}  // namespace dynsvd
