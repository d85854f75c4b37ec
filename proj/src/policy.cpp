#include "dynsvd/policy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dynsvd {

void validate(const RestartPolicy& policy) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MarginPolicy>) {
                if (!(p.theta >= 0.0)) {
                    throw std::invalid_argument("margin policy: theta must be >= 0");
                }
            } else if constexpr (std::is_same_v<T, Lwi2Policy>) {
                if (!(p.threshold > 0.0)) {
                    throw std::invalid_argument("lwi2 policy: threshold must be > 0");
                }
            } else if constexpr (std::is_same_v<T, FixedEdgesPolicy>) {
                if (p.edges_per_restart <= 0) {
                    throw std::invalid_argument("fixed-edges policy: count must be > 0");
                }
            } else {
                if (p.slices_per_restart <= 0) {
                    throw std::invalid_argument("fixed-slices policy: count must be > 0");
                }
            }
        },
        policy);
}

bool decide(const RestartPolicy& policy, const PolicyContext& ctx) {
    return std::visit(
        [&](const auto& p) -> bool {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MarginPolicy>) {
                if (ctx.bound <= 0.0) return true;  // vacuous bound
                return (ctx.loss - ctx.bound) / ctx.bound > p.theta;
            } else if constexpr (std::is_same_v<T, Lwi2Policy>) {
                const double ref = p.mode == Lwi2Policy::Mode::Absolute
                                       ? 1.0
                                       : std::max(ctx.initial_loss, 1e-300);
                return ctx.loss > p.threshold * ref;
            } else if constexpr (std::is_same_v<T, FixedEdgesPolicy>) {
                return ctx.edges_since_restart >= p.edges_per_restart;
            } else {
                return ctx.slices_since_restart >= p.slices_per_restart;
            }
        },
        policy);
}

std::string policy_name(const RestartPolicy& policy) {
    switch (policy.index()) {
        case 0: return "margin";
        case 1: return "lwi2";
        case 2: return "fixed-edges";
        default: return "fixed-slices";
    }
}

std::string policy_params(const RestartPolicy& policy) {
    std::ostringstream os;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MarginPolicy>) {
                os << "theta=" << p.theta;
            } else if constexpr (std::is_same_v<T, Lwi2Policy>) {
                os << "threshold=" << p.threshold << ",mode="
                   << (p.mode == Lwi2Policy::Mode::Absolute ? "absolute" : "relative");
            } else if constexpr (std::is_same_v<T, FixedEdgesPolicy>) {
                os << "edges=" << p.edges_per_restart;
            } else {
                os << "slices=" << p.slices_per_restart;
            }
        },
        policy);
    return os.str();
}

double policy_knob(const RestartPolicy& policy) {
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MarginPolicy>) {
                return p.theta;
            } else if constexpr (std::is_same_v<T, Lwi2Policy>) {
                return p.threshold;
            } else if constexpr (std::is_same_v<T, FixedEdgesPolicy>) {
                return static_cast<double>(p.edges_per_restart);
            } else {
                return static_cast<double>(p.slices_per_restart);
            }
        },
        policy);
}

RestartPolicy with_knob(const RestartPolicy& policy, double knob) {
    RestartPolicy out = policy;
    std::visit(
        [&](auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MarginPolicy>) {
                p.theta = knob;
            } else if constexpr (std::is_same_v<T, Lwi2Policy>) {
                p.threshold = knob;
            } else if constexpr (std::is_same_v<T, FixedEdgesPolicy>) {
                p.edges_per_restart = std::max<long long>(1, std::llround(knob));
            } else {
                p.slices_per_restart = std::max(1, static_cast<int>(std::llround(knob)));
            }
        },
        out);
    return out;
}

bool knob_is_integer(const RestartPolicy& policy) {
    return policy.index() >= 2;
}

}  // namespace dynsvd
