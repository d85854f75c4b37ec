#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynsvd/engine.hpp"
#include "dynsvd/loss.hpp"
#include "dynsvd/synth.hpp"
#include "test_support.hpp"

using namespace dynsvd;
using namespace testsup;

namespace {

// Straight-line reference: dense matrices, loss and bound recomputed from
// scratch every slice with the dense oracle, same decision rule. Hold only.
struct RefSlice {
    double loss, bound;
    bool restarted;
};

std::vector<RefSlice> reference_run(const SymSparseMatrix& a0, const SliceStream& stream,
                                    Similarity sim, int k, const RestartPolicy& policy) {
    auto similarity_dense = [&](const SymSparseMatrix& a) {
        return to_dense(apply_similarity(sim, a));
    };
    SymSparseMatrix a = a0;
    Eigen::MatrixXd s = similarity_dense(a);

    auto fresh = [&](const Eigen::MatrixXd& m) {
        DenseEigs es = dense_eigs_oracle(m);
        std::vector<int> idx = top_k_indices(es.values, k, EigenOrder::Magnitude);
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m.rows(), m.cols());
        for (int i : idx) r += es.values[i] * es.vectors.col(i) * es.vectors.col(i).transpose();
        return r;
    };

    Eigen::MatrixXd recon = fresh(s);
    Eigen::MatrixXd s_anchor = s;
    double anchor_loss = (s - recon).squaredNorm();
    const double initial_loss = anchor_loss;
    long long edges_since = 0;
    int slices_since = 0;

    std::vector<RefSlice> out;
    for (const auto& da : stream.slices) {
        SymSparseMatrix a_next = a;
        a_next.add_scaled(da);
        Eigen::MatrixXd s_next = similarity_dense(a_next);
        a = a_next;
        s = s_next;

        const double j = (s - recon).squaredNorm();
        const Eigen::MatrixXd dS = s - s_anchor;
        const Eigen::MatrixXd nabla = s_anchor * dS + dS * s_anchor + dS * dS;
        const double lamk = dense_topk_values(nabla, k, EigenOrder::Algebraic).sum();
        const double b = anchor_loss + (s.squaredNorm() - s_anchor.squaredNorm()) - lamk;

        long long edges = 0;
        da.for_each_canonical([&](int, int, double) { ++edges; });
        edges_since += edges;
        slices_since += 1;
        PolicyContext ctx{j, b, initial_loss, edges_since, slices_since};
        const bool fire = decide(policy, ctx);
        out.push_back(RefSlice{j, b, fire});
        if (fire) {
            recon = fresh(s);
            s_anchor = s;
            anchor_loss = (s - recon).squaredNorm();
            edges_since = 0;
            slices_since = 0;
        }
    }
    return out;
}

Synthetic small_world(std::uint64_t seed = 3, int n = 60) {
    SyntheticSpec spec{RandomSpec{n, 3 * n, 4 * n}, seed};
    return generate(spec, 12);
}

}  // namespace

TEST_CASE("decide") {
    PolicyContext ctx;
    SUBCASE("margin: zero margin does not fire") {
        ctx.loss = ctx.bound = 2.0;
        CHECK(!decide(MarginPolicy{0.0}, ctx));
    }
    SUBCASE("margin: vacuous bound fires") {
        ctx.loss = 1.0;
        ctx.bound = 0.0;
        CHECK(decide(MarginPolicy{100.0}, ctx));
        ctx.bound = -3.0;
        CHECK(decide(MarginPolicy{100.0}, ctx));
    }
    SUBCASE("margin: threshold boundary") {
        ctx.loss = 1.1;
        ctx.bound = 1.0;
        CHECK(!decide(MarginPolicy{0.10000000001}, ctx));
        CHECK(decide(MarginPolicy{0.0999}, ctx));
    }
    SUBCASE("fixed-edges fires at the budget") {
        ctx.edges_since_restart = 100;
        CHECK(decide(FixedEdgesPolicy{100}, ctx));
        ctx.edges_since_restart = 99;
        CHECK(!decide(FixedEdgesPolicy{100}, ctx));
    }
    SUBCASE("fixed-slices") {
        ctx.slices_since_restart = 10;
        CHECK(decide(FixedSlicesPolicy{10}, ctx));
        CHECK(!decide(FixedSlicesPolicy{11}, ctx));
    }
    SUBCASE("lwi2 absolute and relative") {
        ctx.loss = 6.0;
        ctx.initial_loss = 2.0;
        CHECK(decide(Lwi2Policy{5.0, Lwi2Policy::Mode::Absolute}, ctx));
        CHECK(!decide(Lwi2Policy{7.0, Lwi2Policy::Mode::Absolute}, ctx));
        CHECK(decide(Lwi2Policy{2.5, Lwi2Policy::Mode::RelativeToInitial}, ctx));
        CHECK(!decide(Lwi2Policy{3.5, Lwi2Policy::Mode::RelativeToInitial}, ctx));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(validate(RestartPolicy{FixedEdgesPolicy{0}}), std::invalid_argument);
        CHECK_THROWS_AS(validate(RestartPolicy{FixedSlicesPolicy{-1}}), std::invalid_argument);
        CHECK_THROWS_AS(validate(RestartPolicy{Lwi2Policy{0.0}}), std::invalid_argument);
    }
}

TEST_CASE("updaters") {
    SUBCASE("hold is the identity") {
        CounterRng rng(2);
        SpectralFactors f = random_factors(rng, 10, 3);
        DeltaMatrix d = random_delta(rng, 10, 4);
        SpectralFactors g = update_hold(f, d);
        CHECK(g.u == f.u);
        CHECK(g.v == f.v);
    }
    SUBCASE("first-order: empty delta is the identity") {
        CounterRng rng(4);
        SpectralFactors f = random_factors(rng, 10, 3);
        SpectralFactors g = update_first_order(f, DeltaMatrix(10), 1e-6);
        CHECK(g.u == f.u);
    }
    SUBCASE("diagonal fixture: lambda moves by epsilon, vector fixed") {
        SymSparseMatrix m(2);
        m.set(0, 0, 3.0);
        m.set(1, 1, 1.0);
        SpectralFactors f = SpectralFactors::from_eigs(topk_eigs(m, 2));
        DeltaMatrix d(2);
        d.set(0, 0, 0.01);
        SpectralFactors g = update_first_order(f, d, 1e-9);
        CHECK(g.signed_value(0) == doctest::Approx(3.01).epsilon(1e-12));
        CHECK(std::abs(g.u.col(0).dot(f.u.col(0))) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("second-order accuracy of the tracked top eigenvalue") {
        CounterRng rng(8);
        SymSparseMatrix m = random_sym(rng, 50, 0.2);
        SpectralFactors f = SpectralFactors::from_eigs(topk_eigs(m, 8));
        DeltaMatrix d0 = random_delta(rng, 50, 10);
        // shrink the same perturbation; the error must fall quadratically
        double prev_err = -1.0;
        for (double scale : {1e-1, 1e-2, 1e-3}) {
            DeltaMatrix d(50);
            d.add_scaled(d0, scale);
            SpectralFactors g = update_first_order(f, d, 1e-12);
            SymSparseMatrix m2 = m;
            m2.add_scaled(d);
            const double truth = dense_topk_values(to_dense(m2), 1, EigenOrder::Magnitude)[0];
            const double err = std::abs(g.signed_value(0) - truth);
            CHECK(err <= 10.0 * d.frob_sq());  // |error| <= c * ||D||_F^2
            if (prev_err > 0.0) CHECK(err < prev_err);
            prev_err = err;
        }
    }
    SUBCASE("infinite gap floor keeps the vectors") {
        CounterRng rng(12);
        SpectralFactors f = random_factors(rng, 12, 3);
        DeltaMatrix d = random_delta(rng, 12, 5);
        SpectralFactors g =
            update_first_order(f, d, std::numeric_limits<double>::infinity());
        // columns may be re-ordered by the magnitude sort; compare as sets
        for (int l = 0; l < 3; ++l) {
            bool found = false;
            for (int j = 0; j < 3; ++j) found |= (g.u.col(l) - f.u.col(j)).norm() < 1e-15;
            CHECK(found);
        }
    }
}

TEST_CASE("run: empty stream gives one decomposition and no restarts") {
    Synthetic g = small_world();
    SliceStream empty;
    empty.n = g.a0.dim();
    RunResult r = run(g.a0, empty, Similarity::Identity, 6, MarginPolicy{0.05}, HoldUpdater{});
    CHECK(r.record.restart_count == 0);
    CHECK(r.record.slices.empty());
    CHECK(r.factors.size() == 1);
    // the initial factors achieve the minimum loss
    SymSparseMatrix s = g.a0;
    const double l = min_loss(s.frob_sq(), dense_topk_values(to_dense(s), 6, EigenOrder::Magnitude));
    CHECK(reconstruction_loss(s, r.final_factors) == doctest::Approx(l).epsilon(1e-8));
}

TEST_CASE("run: theta = 0 restarts at every slice with nonzero change") {
    Synthetic g = small_world(5);
    RunResult r = run(g.a0, g.stream, Similarity::Identity, 6, MarginPolicy{0.0}, HoldUpdater{});
    int nonzero = 0;
    for (const auto& d : g.stream.slices) nonzero += d.empty() ? 0 : 1;
    CHECK(r.record.restart_count == nonzero);
}

TEST_CASE("run: restart resets the loss to the fresh minimum") {
    Synthetic g = small_world(7);
    RunResult r = run(g.a0, g.stream, Similarity::Identity, 5, FixedSlicesPolicy{3},
                      HoldUpdater{});
    SymSparseMatrix s = g.a0;
    for (int t = 1; t <= g.stream.T(); ++t) {
        s.add_scaled(g.stream.slices[static_cast<std::size_t>(t - 1)]);
        const auto& rec = r.record.slices[static_cast<std::size_t>(t - 1)];
        if (rec.restarted) {
            const double l =
                min_loss(s.frob_sq(), dense_topk_values(to_dense(s), 5, EigenOrder::Magnitude));
            CHECK(std::abs(rec.loss_post - l) <= 1e-8 * std::max(1.0, l));
        }
    }
}

TEST_CASE("run matches the straight-line dense reference") {
    auto compare = [](const Synthetic& g, Similarity sim, int k, const RestartPolicy& policy) {
        RunResult got = run(g.a0, g.stream, sim, k, policy, HoldUpdater{});
        std::vector<RefSlice> want = reference_run(g.a0, g.stream, sim, k, policy);
        REQUIRE(got.record.slices.size() == want.size());
        for (std::size_t t = 0; t < want.size(); ++t) {
            const auto& a = got.record.slices[t];
            const auto& b = want[t];
            CHECK(a.restarted == b.restarted);
            CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-6));
            CHECK(a.bound == doctest::Approx(b.bound).epsilon(1e-6));
        }
    };
    SUBCASE("small instances, both similarities") {
        for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
            Synthetic g = small_world(seed, 50);
            for (Similarity sim : {Similarity::Identity, Similarity::Normalized}) {
                compare(g, sim, 5, MarginPolicy{0.08});
            }
        }
    }
    SUBCASE("200 nodes, 20 slices, k = 10, theta = 0.05") {
        Synthetic g = generate(SyntheticSpec{RandomSpec{200, 600, 800}, 27}, 20);
        compare(g, Similarity::Identity, 10, MarginPolicy{0.05});
    }
}

TEST_CASE("run: margin guarantee at non-restart slices") {
    Synthetic g = small_world(31);
    const double theta = 0.1;
    RunResult r = run(g.a0, g.stream, Similarity::Identity, 6, MarginPolicy{theta},
                      HoldUpdater{});
    for (const auto& rec : r.record.slices) {
        if (!rec.restarted) {
            CHECK(rec.margin <= theta + 1e-12);
        }
    }
}

TEST_CASE("run: true relative error is dominated by the recorded margin") {
    Synthetic g = small_world(37, 40);
    RunResult r = run(g.a0, g.stream, Similarity::Identity, 4, MarginPolicy{0.15},
                      HoldUpdater{});
    SymSparseMatrix s = g.a0;
    for (std::size_t t = 0; t < r.record.slices.size(); ++t) {
        s.add_scaled(g.stream.slices[t]);
        const auto& rec = r.record.slices[t];
        const double l =
            min_loss(s.frob_sq(), dense_topk_values(to_dense(s), 4, EigenOrder::Magnitude));
        if (l > 0.0 && rec.bound > 0.0) {
            const double true_r = (rec.loss - l) / l;
            CHECK(true_r <= rec.margin + 1e-9);
        }
    }
}

TEST_CASE("run: restart-count monotonicity in theta under hold") {
    Synthetic g = small_world(41);
    int prev = std::numeric_limits<int>::max();
    for (double theta : {0.0, 0.02, 0.05, 0.1, 0.3, 1.0, 10.0}) {
        RunResult r =
            run(g.a0, g.stream, Similarity::Identity, 6, MarginPolicy{theta}, HoldUpdater{});
        CHECK(r.record.restart_count <= prev);
        prev = r.record.restart_count;
    }
}

TEST_CASE("run: determinism of records across invocations") {
    Synthetic g = small_world(43);
    RunResult a = run(g.a0, g.stream, Similarity::Identity, 6, MarginPolicy{0.05},
                      FirstOrderUpdater{1e-6});
    RunResult b = run(g.a0, g.stream, Similarity::Identity, 6, MarginPolicy{0.05},
                      FirstOrderUpdater{1e-6});
    REQUIRE(a.record.slices.size() == b.record.slices.size());
    for (std::size_t t = 0; t < a.record.slices.size(); ++t) {
        CHECK(a.record.slices[t].loss == b.record.slices[t].loss);
        CHECK(a.record.slices[t].bound == b.record.slices[t].bound);
        CHECK(a.record.slices[t].restarted == b.record.slices[t].restarted);
    }
}

TEST_CASE("run: incremental loss stays consistent under the first-order updater") {
    Synthetic g = small_world(47, 40);
    RunResult r = run(g.a0, g.stream, Similarity::Identity, 5, FixedSlicesPolicy{4},
                      FirstOrderUpdater{1e-8});
    SymSparseMatrix s = g.a0;
    for (std::size_t t = 0; t < r.record.slices.size(); ++t) {
        s.add_scaled(g.stream.slices[t]);
        const double full = reconstruction_loss(s, r.factors[t + 1]);
        CHECK(std::abs(r.record.slices[t].loss_post - full) <=
              1e-8 * std::max(full, 1e-3 * s.frob_sq()));
    }
}

TEST_CASE("between-restart measurements") {
    Synthetic g = small_world(53);
    RunResult r = run(g.a0, g.stream, Similarity::Identity, 6, FixedSlicesPolicy{4},
                      HoldUpdater{});
    auto stats = between_restart_stats(r.record);
    REQUIRE(stats.size() == static_cast<std::size_t>(r.record.restart_count));
    for (const auto& s : stats) {
        CHECK(s.slices == 4);
        CHECK(s.edges > 0);
        CHECK(s.loss_change >= 0.0);
    }
}
