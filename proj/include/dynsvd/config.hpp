#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dynsvd/events.hpp"
#include "dynsvd/policy.hpp"
#include "dynsvd/similarity.hpp"
#include "dynsvd/synth.hpp"
#include "dynsvd/updater.hpp"

namespace dynsvd {

inline constexpr const char* kToolName = "dynsvd";
inline constexpr const char* kToolVersion = "0.1.0";

/// Fully resolved run configuration; serialized into every artifact.
struct RunConfig {
    // input: either an edge-list file or a synthetic model
    std::string input;  // path; empty when synthetic
    std::string model;  // random | celebrity | community; empty when file input
    int n = 0;
    long long m_static = 0;
    long long m_evolve = 0;
    int trigger_slice = 1;
    int celebrity_node = -1;  // -1: sampled
    double attach_fraction = 0.1;
    double node_fraction = 0.2;
    int communities = 2;
    double intra_prob = 0.5;

    double static_fraction = 0.6;
    int T = 50;
    std::string slicing = "equal-edges";
    int k = 100;  // capped at n/2 when the universe is smaller
    std::string similarity = "identity";

    std::string policy = "margin";
    double theta = 0.05;
    double loss_threshold = 1.5;
    std::string lwi2_mode = "relative";
    long long edges_per_restart = 100;
    int slices_per_restart = 10;

    std::string updater = "hold";
    double gap_floor = 1e-6;

    std::uint64_t seed = 1;
    double eig_tol = 1e-9;
    bool oracle = false;   // dense-oracle truth columns in the run artifact
    bool timings = false;  // real wall-clock fields (breaks byte-reproducibility)

    std::string out_csv;
    std::string out_json;

    /// Effective rank for a universe of n nodes: min(k, max(1, n/2)).
    int effective_k(int nodes) const;

    RestartPolicy make_policy() const;
    Updater make_updater() const;
    Similarity make_similarity() const { return similarity_from_name(similarity); }
    SlicingMode make_slicing() const { return slicing_mode_from_name(slicing); }
    SyntheticSpec make_synthetic() const;

    /// Throws std::invalid_argument with an actionable message.
    void validate_config() const;

    std::string to_json_string() const;
};

/// Loads the stream described by the config: either parses and splits the
/// input file or generates the synthetic model. Returns the static matrix and
/// slice stream; warnings (non-fatal) are appended when given.
struct LoadedStream {
    SymSparseMatrix a0;
    SliceStream stream;
    std::vector<std::string> warnings;
};
LoadedStream load_stream(const RunConfig& config);

}  // namespace dynsvd
