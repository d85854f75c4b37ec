#pragma once

#include <string>
#include <variant>

namespace dynsvd {

/// Restart when the monitored margin (J - B) / B exceeds theta, or when the
/// bound is non-positive (vacuous bound forces a restart).
struct MarginPolicy {
    double theta = 0.05;
};

/// Baseline: restart when the reconstruction loss exceeds a threshold,
/// either absolute or as a multiple of the loss right after the initial
/// decomposition.
struct Lwi2Policy {
    enum class Mode { Absolute, RelativeToInitial };
    double threshold = 1.5;
    Mode mode = Mode::RelativeToInitial;
};

/// Baseline: restart after a fixed number of changed edges.
struct FixedEdgesPolicy {
    long long edges_per_restart = 100;
};

/// Baseline: restart after a fixed number of time slices.
struct FixedSlicesPolicy {
    int slices_per_restart = 10;
};

using RestartPolicy =
    std::variant<MarginPolicy, Lwi2Policy, FixedEdgesPolicy, FixedSlicesPolicy>;

struct PolicyContext {
    double loss = 0.0;               // J(t)
    double bound = 0.0;              // B(t)
    double initial_loss = 0.0;       // loss right after the initial decomposition
    long long edges_since_restart = 0;
    int slices_since_restart = 0;
};

/// Throws std::invalid_argument on non-positive parameters.
void validate(const RestartPolicy& policy);

bool decide(const RestartPolicy& policy, const PolicyContext& ctx);

std::string policy_name(const RestartPolicy& policy);
std::string policy_params(const RestartPolicy& policy);

/// Uniform knob access for threshold sweeps. For every policy a larger knob
/// value produces at most as many restarts.
double policy_knob(const RestartPolicy& policy);
RestartPolicy with_knob(const RestartPolicy& policy, double knob);
bool knob_is_integer(const RestartPolicy& policy);

}  // namespace dynsvd
