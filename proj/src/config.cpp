#include "dynsvd/config.hpp"

#include <json.hpp>
#include <stdexcept>

namespace dynsvd {

using ordered_json = nlohmann::ordered_json;

int RunConfig::effective_k(int nodes) const {
    const int cap = std::max(1, nodes / 2);
    return std::min(k, cap);
}

RestartPolicy RunConfig::make_policy() const {
    if (policy == "margin") return MarginPolicy{theta};
    if (policy == "lwi2") {
        Lwi2Policy p;
        p.threshold = loss_threshold;
        if (lwi2_mode == "absolute") {
            p.mode = Lwi2Policy::Mode::Absolute;
        } else if (lwi2_mode == "relative") {
            p.mode = Lwi2Policy::Mode::RelativeToInitial;
        } else {
            throw std::invalid_argument("lwi2 mode must be absolute or relative");
        }
        return p;
    }
    if (policy == "fixed-edges") return FixedEdgesPolicy{edges_per_restart};
    if (policy == "fixed-slices") return FixedSlicesPolicy{slices_per_restart};
    throw std::invalid_argument("unknown policy: " + policy +
                                " (expected margin|lwi2|fixed-edges|fixed-slices)");
}

Updater RunConfig::make_updater() const {
    if (updater == "hold") return HoldUpdater{};
    if (updater == "first-order") return FirstOrderUpdater{gap_floor};
    throw std::invalid_argument("unknown updater: " + updater + " (expected hold|first-order)");
}

SyntheticSpec RunConfig::make_synthetic() const {
    RandomSpec base{n, m_static, m_evolve};
    if (model == "random") return SyntheticSpec{base, seed};
    if (model == "celebrity") {
        CelebritySpec c{base, trigger_slice,
                        celebrity_node >= 0 ? std::optional<int>(celebrity_node) : std::nullopt,
                        attach_fraction};
        return SyntheticSpec{c, seed};
    }
    if (model == "community") {
        CommunitySpec c{base, trigger_slice, node_fraction, communities, intra_prob};
        return SyntheticSpec{c, seed};
    }
    throw std::invalid_argument("unknown model: " + model +
                                " (expected random|celebrity|community)");
}

void RunConfig::validate_config() const {
    if (input.empty() == model.empty()) {
        throw std::invalid_argument("exactly one of --input or --model must be given");
    }
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(eig_tol > 0.0)) throw std::invalid_argument("eig-tol must be > 0");
    if (!input.empty() && !(static_fraction > 0.0 && static_fraction < 1.0)) {
        throw std::invalid_argument("static-fraction must be in (0, 1)");
    }
    if (!(gap_floor > 0.0)) throw std::invalid_argument("gap-floor must be > 0");
    make_policy();
    make_updater();
    make_similarity();
    make_slicing();
    if (!model.empty()) make_synthetic();
    RestartPolicy p = make_policy();
    validate(p);
}

std::string RunConfig::to_json_string() const {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["input"] = input;
    j["model"] = model;
    if (!model.empty()) {
        j["n"] = n;
        j["m_static"] = m_static;
        j["m_evolve"] = m_evolve;
        if (model == "celebrity") {
            j["trigger_slice"] = trigger_slice;
            j["celebrity_node"] = celebrity_node;
            j["attach_fraction"] = attach_fraction;
        }
        if (model == "community") {
            j["trigger_slice"] = trigger_slice;
            j["node_fraction"] = node_fraction;
            j["communities"] = communities;
            j["intra_prob"] = intra_prob;
        }
    }
    if (!input.empty()) j["static_fraction"] = static_fraction;
    j["T"] = T;
    j["slicing"] = slicing;
    j["k"] = k;
    j["similarity"] = similarity;
    j["policy"] = policy;
    if (policy == "margin") j["theta"] = theta;
    if (policy == "lwi2") {
        j["loss_threshold"] = loss_threshold;
        j["lwi2_mode"] = lwi2_mode;
    }
    if (policy == "fixed-edges") j["edges_per_restart"] = edges_per_restart;
    if (policy == "fixed-slices") j["slices_per_restart"] = slices_per_restart;
    j["updater"] = updater;
    if (updater == "first-order") j["gap_floor"] = gap_floor;
    j["seed"] = seed;
    j["eig_tol"] = eig_tol;
    j["oracle"] = oracle;
    j["timings"] = timings;
    return j.dump();
}

LoadedStream load_stream(const RunConfig& config) {
    LoadedStream out;
    if (!config.model.empty()) {
        Synthetic g = generate(config.make_synthetic(), config.T);
        out.a0 = std::move(g.a0);
        out.stream = std::move(g.stream);
        return out;
    }
    LoadResult loaded = load_events(config.input);
    out.warnings = loaded.warnings;
    if (loaded.events.empty()) {
        throw std::runtime_error("input has no events: " + config.input);
    }
    const int nodes = node_count(loaded.events);
    auto [a0, evolving] = split_static_evolving(loaded.events, config.static_fraction, nodes);
    out.a0 = std::move(a0);
    out.stream = slice_events(evolving, config.T, config.make_slicing(), nodes);
    return out;
}

}  // namespace dynsvd
