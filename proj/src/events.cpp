#include "dynsvd/events.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dynsvd {

LoadResult load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_events: cannot open " + path);
    }
    LoadResult out;
    std::string line;
    long long line_no = 0;
    double last_ts = -std::numeric_limits<double>::infinity();
    bool warned_order = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        EdgeEvent ev;
        if (!(ls >> ev.u >> ev.v)) {
            throw std::runtime_error("load_events: parse failure at line " +
                                     std::to_string(line_no) + " of " + path);
        }
        if (ev.u < 0 || ev.v < 0) {
            throw std::runtime_error("load_events: negative node id at line " +
                                     std::to_string(line_no) + " of " + path);
        }
        ev.w = 1.0;
        ev.ts = static_cast<double>(line_no);
        double field;
        if (ls >> field) {
            ev.w = field;
            if (ls >> field) ev.ts = field;
        }
        std::string rest;
        if (ls >> rest) {
            throw std::runtime_error("load_events: trailing tokens at line " +
                                     std::to_string(line_no) + " of " + path);
        }
        if (ev.ts < last_ts && !warned_order) {
            out.warnings.push_back("non-monotone timestamp at line " + std::to_string(line_no) +
                                   "; file order preserved");
            warned_order = true;
        }
        last_ts = std::max(last_ts, ev.ts);
        out.events.push_back(ev);
    }
    return out;
}

int node_count(const std::vector<EdgeEvent>& events) {
    int m = -1;
    for (const EdgeEvent& e : events) m = std::max({m, e.u, e.v});
    return m + 1;
}

std::pair<SymSparseMatrix, std::vector<EdgeEvent>> split_static_evolving(
    const std::vector<EdgeEvent>& events, double static_fraction, int n) {
    if (!(static_fraction > 0.0 && static_fraction < 1.0)) {
        throw std::invalid_argument("split_static_evolving: fraction must be in (0, 1)");
    }
    const long long count = static_cast<long long>(events.size());
    long long n_static = static_cast<long long>(
        std::ceil(static_fraction * static_cast<double>(count)));
    n_static = std::min(n_static, count - 1);  // keep at least one evolving event
    if (n_static < 0) n_static = 0;
    SymSparseMatrix a0(n);
    for (long long i = 0; i < n_static; ++i) {
        const EdgeEvent& e = events[static_cast<std::size_t>(i)];
        a0.add(e.u, e.v, e.w);
    }
    std::vector<EdgeEvent> rest(events.begin() + static_cast<std::ptrdiff_t>(n_static),
                                events.end());
    return {std::move(a0), std::move(rest)};
}

SlicingMode slicing_mode_from_name(const std::string& name) {
    if (name == "equal-edges") return SlicingMode::EqualEdges;
    if (name == "equal-time") return SlicingMode::EqualTime;
    throw std::invalid_argument("unknown slicing mode: " + name);
}

std::string slicing_mode_name(SlicingMode m) {
    return m == SlicingMode::EqualEdges ? "equal-edges" : "equal-time";
}

SliceStream slice_events(const std::vector<EdgeEvent>& events, int T, SlicingMode mode, int n) {
    if (T < 1) throw std::invalid_argument("slice_events: T must be >= 1");
    SliceStream out;
    out.mode = mode;
    out.n = n;
    out.slices.assign(static_cast<std::size_t>(T), DeltaMatrix(n));
    if (events.empty()) return out;

    if (mode == SlicingMode::EqualEdges) {
        const long long count = static_cast<long long>(events.size());
        const long long block = (count + T - 1) / T;
        for (long long i = 0; i < count; ++i) {
            const auto s = static_cast<std::size_t>(std::min<long long>(i / block, T - 1));
            const EdgeEvent& e = events[static_cast<std::size_t>(i)];
            out.slices[s].add(e.u, e.v, e.w);
        }
    } else {
        double lo = events.front().ts, hi = events.front().ts;
        for (const EdgeEvent& e : events) {
            lo = std::min(lo, e.ts);
            hi = std::max(hi, e.ts);
        }
        const double width = hi - lo;
        for (const EdgeEvent& e : events) {
            int s = 0;
            if (width > 0.0) {
                s = static_cast<int>(std::floor((e.ts - lo) / width * T));
                s = std::clamp(s, 0, T - 1);
            }
            out.slices[static_cast<std::size_t>(s)].add(e.u, e.v, e.w);
        }
    }
    return out;
}

SymSparseMatrix apply_stream(const SymSparseMatrix& a0, const SliceStream& stream) {
    SymSparseMatrix a = a0;
    for (const auto& d : stream.slices) a.add_scaled(d);
    return a;
}

}  // namespace dynsvd
