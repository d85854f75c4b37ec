#include "dynsvd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "dynsvd/rng.hpp"

namespace dynsvd {

namespace {

std::uint64_t pair_key(int i, int j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
}

struct PairSampler {
    int n;
    CounterRng& rng;
    std::unordered_set<std::uint64_t>& used;

    std::pair<int, int> sample() {
        for (;;) {
            const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (i == j) continue;
            const std::uint64_t key = pair_key(i, j);
            if (used.insert(key).second) {
                return {std::min(i, j), std::max(i, j)};
            }
        }
    }
};

void validate_base(const RandomSpec& b) {
    if (b.n < 2) throw std::invalid_argument("generate: n must be >= 2");
    if (b.m_static < 0 || b.m_evolve < 0) {
        throw std::invalid_argument("generate: edge counts must be non-negative");
    }
    const long long max_pairs = static_cast<long long>(b.n) * (b.n - 1) / 2;
    if (b.m_static + b.m_evolve > max_pairs) {
        throw std::invalid_argument("generate: edge counts exceed n*(n-1)/2");
    }
    // rejection sampling stays cheap only on sparse instances
    if (b.m_static + b.m_evolve > max_pairs * 7 / 10) {
        throw std::invalid_argument("generate: requested density too close to complete graph");
    }
}

}  // namespace

std::string SyntheticSpec::model_name() const {
    if (std::holds_alternative<RandomSpec>(model)) return "random";
    if (std::holds_alternative<CelebritySpec>(model)) return "celebrity";
    return "community";
}

Synthetic generate(const SyntheticSpec& spec, int T) {
    if (T < 1) throw std::invalid_argument("generate: T must be >= 1");

    const RandomSpec& base = std::holds_alternative<RandomSpec>(spec.model)
                                 ? std::get<RandomSpec>(spec.model)
                             : std::holds_alternative<CelebritySpec>(spec.model)
                                 ? std::get<CelebritySpec>(spec.model).base
                                 : std::get<CommunitySpec>(spec.model).base;
    validate_base(base);
    const int n = base.n;

    CounterRng rng(spec.seed);
    std::unordered_set<std::uint64_t> used;
    PairSampler sampler{n, rng, used};

    Synthetic out;
    out.a0 = SymSparseMatrix(n);
    out.events.reserve(static_cast<std::size_t>(base.m_static + base.m_evolve));

    for (long long e = 0; e < base.m_static; ++e) {
        auto [i, j] = sampler.sample();
        out.a0.add(i, j, 1.0);
        out.events.push_back(EdgeEvent{i, j, 1.0, 0.0});
    }

    // evolving base edges in equal blocks of ceil(m_evolve / T)
    std::vector<std::vector<EdgeEvent>> per_slice(static_cast<std::size_t>(T));
    const long long block = base.m_evolve > 0 ? (base.m_evolve + T - 1) / T : 1;
    for (long long e = 0; e < base.m_evolve; ++e) {
        auto [i, j] = sampler.sample();
        const int s = static_cast<int>(std::min<long long>(e / block, T - 1));
        per_slice[static_cast<std::size_t>(s)].push_back(
            EdgeEvent{i, j, 1.0, static_cast<double>(s + 1)});
    }

    if (const auto* cel = std::get_if<CelebritySpec>(&spec.model)) {
        if (cel->trigger_slice < 1 || cel->trigger_slice > T) {
            throw std::invalid_argument("generate: trigger_slice outside [1, T]");
        }
        if (!(cel->attach_fraction > 0.0 && cel->attach_fraction <= 1.0)) {
            throw std::invalid_argument("generate: attach_fraction outside (0, 1]");
        }
        const int celebrity =
            cel->celebrity_node ? *cel->celebrity_node
                                : static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        if (celebrity < 0 || celebrity >= n) {
            throw std::invalid_argument("generate: celebrity node outside [0, n)");
        }
        const long long attach = static_cast<long long>(
            std::ceil(cel->attach_fraction * static_cast<double>(n)));
        long long free_partners = 0;
        for (int v = 0; v < n; ++v) {
            if (v != celebrity && !used.count(pair_key(celebrity, v))) ++free_partners;
        }
        if (attach > free_partners) {
            throw std::invalid_argument("generate: celebrity burst larger than available partners");
        }
        auto& slice = per_slice[static_cast<std::size_t>(cel->trigger_slice - 1)];
        for (long long e = 0; e < attach;) {
            const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (v == celebrity) continue;
            if (!used.insert(pair_key(celebrity, v)).second) continue;
            slice.push_back(EdgeEvent{std::min(celebrity, v), std::max(celebrity, v), 1.0,
                                      static_cast<double>(cel->trigger_slice)});
            ++e;
        }
    } else if (const auto* com = std::get_if<CommunitySpec>(&spec.model)) {
        if (com->trigger_slice < 1 || com->trigger_slice > T) {
            throw std::invalid_argument("generate: trigger_slice outside [1, T]");
        }
        if (!(com->node_fraction > 0.0 && com->node_fraction <= 1.0) ||
            !(com->intra_prob > 0.0 && com->intra_prob <= 1.0) || com->num_communities < 1) {
            throw std::invalid_argument("generate: bad community parameters");
        }
        const long long pick = static_cast<long long>(
            std::ceil(com->node_fraction * static_cast<double>(n)));
        std::vector<int> nodes;
        std::unordered_set<int> picked;
        while (static_cast<long long>(nodes.size()) < pick) {
            const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (picked.insert(v).second) nodes.push_back(v);
        }
        std::vector<std::vector<int>> groups(static_cast<std::size_t>(com->num_communities));
        for (int v : nodes) {
            groups[rng.next_below(static_cast<std::uint64_t>(com->num_communities))].push_back(v);
        }
        auto& slice = per_slice[static_cast<std::size_t>(com->trigger_slice - 1)];
        for (const auto& g : groups) {
            for (std::size_t a = 0; a < g.size(); ++a) {
                for (std::size_t b = a + 1; b < g.size(); ++b) {
                    if (rng.next_double() >= com->intra_prob) continue;
                    if (!used.insert(pair_key(g[a], g[b])).second) continue;
                    slice.push_back(EdgeEvent{std::min(g[a], g[b]), std::max(g[a], g[b]), 1.0,
                                              static_cast<double>(com->trigger_slice)});
                }
            }
        }
    }

    out.stream.mode = SlicingMode::EqualTime;
    out.stream.n = n;
    out.stream.slices.assign(static_cast<std::size_t>(T), DeltaMatrix(n));
    for (int s = 0; s < T; ++s) {
        for (const EdgeEvent& e : per_slice[static_cast<std::size_t>(s)]) {
            out.stream.slices[static_cast<std::size_t>(s)].add(e.u, e.v, e.w);
            out.events.push_back(e);
        }
    }
    return out;
}

}  // namespace dynsvd
