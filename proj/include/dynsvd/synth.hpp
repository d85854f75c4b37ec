#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dynsvd/events.hpp"

namespace dynsvd {

/// Uniform random graph: m_static distinct edges up front, m_evolve more
/// arriving across the stream. No duplicate pairs, no self-loops, weight 1.
struct RandomSpec {
    int n = 0;
    long long m_static = 0;
    long long m_evolve = 0;
};

/// Random base plus a burst at one slice attaching ceil(attach_fraction * n)
/// previously unconnected nodes to a single node.
struct CelebritySpec {
    RandomSpec base;
    int trigger_slice = 1;
    std::optional<int> celebrity_node;
    double attach_fraction = 0.1;
};

/// Random base plus sudden communities: ceil(node_fraction * n) nodes are
/// assigned uniformly to num_communities groups and intra-group pairs appear
/// independently with intra_prob, all inside the trigger slice.
struct CommunitySpec {
    RandomSpec base;
    int trigger_slice = 1;
    double node_fraction = 0.2;
    int num_communities = 2;
    double intra_prob = 0.5;
};

struct SyntheticSpec {
    std::variant<RandomSpec, CelebritySpec, CommunitySpec> model;
    std::uint64_t seed = 1;

    std::string model_name() const;
};

struct Synthetic {
    SymSparseMatrix a0;
    SliceStream stream;
    /// Flat event list: static events with ts = 0, evolving events with
    /// ts = slice index (1-based). Re-slicing these by equal-time with the
    /// same T reproduces `stream` exactly.
    std::vector<EdgeEvent> events;
};

/// Fully deterministic given spec.seed (counter-based generator; see rng.hpp).
Synthetic generate(const SyntheticSpec& spec, int T);

}  // namespace dynsvd
