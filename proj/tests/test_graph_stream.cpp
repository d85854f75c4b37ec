#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dynsvd/events.hpp"
#include "dynsvd/synth.hpp"
#include "test_support.hpp"

using namespace dynsvd;
using namespace testsup;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        path = std::string("stream_test_") + std::to_string(counter()++) + ".tmp";
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("load_events") {
    SUBCASE("defaults: weight 1, ts = line number") {
        TempFile f("0 1\n1 2\n");
        LoadResult r = load_events(f.path);
        REQUIRE(r.events.size() == 2);
        CHECK(r.events[0].w == 1.0);
        CHECK(r.events[0].ts == 1.0);
        CHECK(r.events[1].ts == 2.0);
        CHECK(r.warnings.empty());
    }
    SUBCASE("comments and blank lines are skipped") {
        TempFile f("# header\n\n0 1\n  # indented comment\n2 3\n");
        LoadResult r = load_events(f.path);
        REQUIRE(r.events.size() == 2);
        CHECK(r.events[1].u == 2);
        CHECK(r.events[1].ts == 5.0);  // physical line number
    }
    SUBCASE("full field mapping, signed weight") {
        TempFile f("0 1 -1 5\n");
        LoadResult r = load_events(f.path);
        REQUIRE(r.events.size() == 1);
        CHECK(r.events[0].w == -1.0);
        CHECK(r.events[0].ts == 5.0);
    }
    SUBCASE("parse failure names the line") {
        TempFile f("0 1\nnot numbers\n");
        CHECK_THROWS_WITH_AS(load_events(f.path),
                             doctest::Contains("line 2"), std::runtime_error);
    }
    SUBCASE("non-monotone timestamps warn but keep order") {
        TempFile f("0 1 1 9\n1 2 1 3\n");
        LoadResult r = load_events(f.path);
        REQUIRE(r.events.size() == 2);
        CHECK(r.events[1].ts == 3.0);
        CHECK(r.warnings.size() == 1);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_events("no_such_file.edges"), std::runtime_error);
    }
}

TEST_CASE("split_static_evolving") {
    std::vector<EdgeEvent> events;
    for (int i = 0; i < 100; ++i) {
        events.push_back(EdgeEvent{i % 7, 7 + i % 5, 1.0, static_cast<double>(i)});
    }
    SUBCASE("fraction 0.6 of 100 splits 60/40") {
        auto [a0, rest] = split_static_evolving(events, 0.6, 12);
        CHECK(rest.size() == 40);
        long long stored = 0;
        a0.for_each_canonical([&](int, int, double w) {
            stored += static_cast<long long>(w);  // duplicates accumulate weight
        });
        CHECK(stored == 60);
    }
    SUBCASE("fraction near 1 leaves at least one evolving event") {
        auto [a0, rest] = split_static_evolving(events, 0.9999, 12);
        CHECK(rest.size() >= 1);
    }
    SUBCASE("fraction bounds") {
        CHECK_THROWS_AS(split_static_evolving(events, 0.0, 12), std::invalid_argument);
        CHECK_THROWS_AS(split_static_evolving(events, 1.0, 12), std::invalid_argument);
    }
}

TEST_CASE("slice_events") {
    SUBCASE("10 events over T=5 equal-edges gives 5 slices of 2") {
        std::vector<EdgeEvent> events;
        for (int i = 0; i < 10; ++i) events.push_back(EdgeEvent{0, i + 1, 1.0, 0.0});
        SliceStream s = slice_events(events, 5, SlicingMode::EqualEdges, 11);
        REQUIRE(s.T() == 5);
        for (const auto& d : s.slices) CHECK(d.stored_count() == 4);  // 2 edges mirrored
    }
    SUBCASE("identical timestamps in equal-time mode land in one slice") {
        std::vector<EdgeEvent> events;
        for (int i = 0; i < 6; ++i) events.push_back(EdgeEvent{0, i + 1, 1.0, 7.0});
        SliceStream s = slice_events(events, 4, SlicingMode::EqualTime, 7);
        CHECK(s.slices[0].stored_count() == 12);
        for (int t = 1; t < 4; ++t) CHECK(s.slices[static_cast<std::size_t>(t)].empty());
    }
    SUBCASE("additive coalescing removes an exact cancellation") {
        std::vector<EdgeEvent> events{EdgeEvent{0, 1, 1.0, 0.0}, EdgeEvent{0, 1, -1.0, 0.0}};
        SliceStream s = slice_events(events, 1, SlicingMode::EqualEdges, 2);
        CHECK(s.slices[0].empty());
    }
    SUBCASE("round-trip: slices reproduce the raw-event matrix exactly") {
        CounterRng rng(5);
        std::vector<EdgeEvent> events;
        for (int i = 0; i < 200; ++i) {
            events.push_back(EdgeEvent{static_cast<int>(rng.next_below(30)),
                                       static_cast<int>(rng.next_below(30)),
                                       rng.next_symmetric(), static_cast<double>(i % 17)});
        }
        SymSparseMatrix direct(30);
        for (const auto& e : events) direct.add(e.u, e.v, e.w);
        for (SlicingMode mode : {SlicingMode::EqualEdges, SlicingMode::EqualTime}) {
            SliceStream s = slice_events(events, 9, mode, 30);
            SymSparseMatrix rebuilt = apply_stream(SymSparseMatrix(30), s);
            CHECK((to_dense(rebuilt) - to_dense(direct)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("generate: random model") {
    SyntheticSpec spec{RandomSpec{100, 200, 300}, 99};
    Synthetic g = generate(spec, 10);
    SUBCASE("exact edge counts") {
        CHECK(g.a0.stored_count() == 400);  // 200 canonical edges mirrored
        CHECK(g.stream.T() == 10);
        long long total = 0;
        for (const auto& d : g.stream.slices) total += static_cast<long long>(d.stored_count());
        CHECK(total == 600);
        for (const auto& d : g.stream.slices) CHECK(d.stored_count() == 60);  // 30 edges
    }
    SUBCASE("no self-loops, no duplicates, weight one") {
        SymSparseMatrix fin = apply_stream(g.a0, g.stream);
        CHECK(fin.stored_count() == 1000);
        fin.for_each_canonical([](int i, int j, double w) {
            CHECK(i != j);
            CHECK(w == 1.0);
        });
    }
    SUBCASE("determinism: same seed, identical events") {
        Synthetic h = generate(spec, 10);
        REQUIRE(h.events.size() == g.events.size());
        for (std::size_t i = 0; i < g.events.size(); ++i) {
            CHECK(g.events[i].u == h.events[i].u);
            CHECK(g.events[i].v == h.events[i].v);
            CHECK(g.events[i].w == h.events[i].w);
            CHECK(g.events[i].ts == h.events[i].ts);
        }
    }
    SUBCASE("different seed differs") {
        SyntheticSpec other{RandomSpec{100, 200, 300}, 100};
        Synthetic h = generate(other, 10);
        bool same = true;
        for (std::size_t i = 0; i < g.events.size() && same; ++i) {
            same = g.events[i].u == h.events[i].u && g.events[i].v == h.events[i].v;
        }
        CHECK(!same);
    }
    SUBCASE("infeasible counts rejected") {
        CHECK_THROWS_AS(generate(SyntheticSpec{RandomSpec{10, 30, 30}, 1}, 5),
                        std::invalid_argument);
    }
}

TEST_CASE("generate: celebrity burst") {
    CelebritySpec cel{RandomSpec{100, 150, 200}, 4, std::nullopt, 0.3};
    Synthetic g = generate(SyntheticSpec{cel, 7}, 10);
    // locate the celebrity: the burst adds ceil(0.3*100) = 30 edges at slice 4
    const DeltaMatrix& burst = g.stream.slices[3];
    CHECK(burst.stored_count() >= 2 * 30);
    // degree spike: one node gains exactly 30 new neighbors from the burst part
    std::vector<int> deg(100, 0);
    int base_at_slice = 0;
    for (const auto& e : g.events) {
        if (e.ts == 4.0) ++base_at_slice;
    }
    CHECK(base_at_slice >= 30 + 20);  // 20 base edges per slice + the burst
    // burst events are the tail of the slice; all touch one node
    std::vector<EdgeEvent> slice4;
    for (const auto& e : g.events) {
        if (e.ts == 4.0) slice4.push_back(e);
    }
    std::vector<EdgeEvent> tail(slice4.end() - 30, slice4.end());
    int cel_node = -1;
    for (int cand : {tail[0].u, tail[0].v}) {
        bool all = true;
        for (const auto& e : tail) all &= (e.u == cand || e.v == cand);
        if (all) cel_node = cand;
    }
    CHECK(cel_node >= 0);
    // every burst edge is new: final weight stays 1
    SymSparseMatrix fin = apply_stream(g.a0, g.stream);
    fin.for_each_canonical([](int, int, double w) { CHECK(w == 1.0); });
}

TEST_CASE("generate: community injection") {
    CommunitySpec com{RandomSpec{80, 100, 100}, 3, 0.5, 4, 0.6};
    Synthetic g = generate(SyntheticSpec{com, 11}, 8);
    const DeltaMatrix& inj = g.stream.slices[2];
    // base block is ceil(100/8) = 13 edges; injection adds many more
    CHECK(inj.stored_count() > 2 * 13);
    SymSparseMatrix fin = apply_stream(g.a0, g.stream);
    fin.for_each_canonical([](int i, int j, double w) {
        CHECK(i != j);
        CHECK(w == 1.0);
    });
    // trigger slice bounds are validated
    CommunitySpec bad = com;
    bad.trigger_slice = 9;
    CHECK_THROWS_AS(generate(SyntheticSpec{bad, 11}, 8), std::invalid_argument);
}

TEST_CASE("generated event list re-slices to the identical stream") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        CelebritySpec cel{RandomSpec{60, 80, 120}, 5, std::nullopt, 0.2};
        Synthetic g = generate(SyntheticSpec{cel, seed}, 9);
        // evolving events only (ts >= 1), re-sliced by equal time
        std::vector<EdgeEvent> evolving;
        for (const auto& e : g.events) {
            if (e.ts >= 1.0) evolving.push_back(e);
        }
        SliceStream rs = slice_events(evolving, 9, SlicingMode::EqualTime, 60);
        REQUIRE(rs.T() == g.stream.T());
        for (int t = 0; t < rs.T(); ++t) {
            CHECK((to_dense(rs.slices[static_cast<std::size_t>(t)]) -
                   to_dense(g.stream.slices[static_cast<std::size_t>(t)]))
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
        }
    }
}
