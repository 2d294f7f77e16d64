#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "kldesign/optimizer.hpp"

using kld::Design;
using kld::ObjectiveKind;
using kld::OptimizerConfig;
using kld::SeededRng;

namespace {

Design random_design(std::size_t n, std::size_t d, std::uint64_t seed) {
    SeededRng rng(seed);
    Design design(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) design(i, k) = rng.uniform();
    return design;
}

}  // namespace

TEST_CASE("single-proposal run never degrades the objective") {
    OptimizerConfig cfg;
    cfg.max_proposals = 1;
    cfg.max_consecutive_rejects = 1;
    cfg.seed = 4;
    const Design initial = random_design(10, 2, 1);
    const auto objective = kld::make_objective(ObjectiveKind::entropy_mc_gauss);
    const auto result = kld::exchange_run(initial, *objective, cfg);
    CHECK(result.trace.final_objective >= result.trace.initial_objective);
    CHECK(result.trace.proposals() == 1);
}

TEST_CASE("exchange runs are deterministic for a fixed seed") {
    for (ObjectiveKind kind :
         {ObjectiveKind::entropy_mc_gauss, ObjectiveKind::entropy_nn, ObjectiveKind::mindist}) {
        OptimizerConfig cfg = OptimizerConfig::defaults(2, 99);
        cfg.max_proposals = 300;
        const Design initial = random_design(12, 2, 7);

        const auto obj_a = kld::make_objective(kind);
        const auto obj_b = kld::make_objective(kind);
        const auto a = kld::exchange_run(initial, *obj_a, cfg);
        const auto b = kld::exchange_run(initial, *obj_b, cfg);
        CHECK(a.design == b.design);
        REQUIRE(a.trace.entries.size() == b.trace.entries.size());
        for (std::size_t e = 0; e < a.trace.entries.size(); ++e) {
            CHECK(a.trace.entries[e].accepted == b.trace.entries[e].accepted);
            CHECK(a.trace.entries[e].objective == b.trace.entries[e].objective);
        }
    }
}

TEST_CASE("accepted objective values are strictly increasing") {
    OptimizerConfig cfg = OptimizerConfig::defaults(3, 11);
    const Design initial = random_design(30, 3, 2);
    for (ObjectiveKind kind :
         {ObjectiveKind::entropy_mc_gauss, ObjectiveKind::entropy_nn, ObjectiveKind::mindist}) {
        const auto objective = kld::make_objective(kind);
        const auto result = kld::exchange_run(initial, *objective, cfg);
        double last = result.trace.initial_objective;
        std::size_t accepted = 0;
        for (const auto& entry : result.trace.entries) {
            if (entry.accepted) {
                CHECK(entry.objective > last);
                ++accepted;
            } else {
                CHECK(entry.objective == last);
            }
            last = entry.objective;
        }
        CHECK(accepted == result.trace.accepted_count);
        CHECK(accepted > 0);  // with 3000 proposals, improvement is certain
        CHECK(result.trace.proposals() <= cfg.max_proposals);
        CHECK(result.trace.final_objective == last);
    }
}

TEST_CASE("run with no accepted proposals leaves the design bit-identical") {
    // a design already optimized hard is nearly impossible to improve from
    // one proposal; instead force rejection with an impossible objective:
    // run mindist on a duplicate-free design with max_proposals = 3 and a
    // seed whose few candidates do not improve (checked via the trace)
    OptimizerConfig cfg;
    cfg.max_proposals = 3;
    cfg.max_consecutive_rejects = 3;
    cfg.seed = 123;
    const Design initial = random_design(40, 2, 21);
    const auto objective = kld::make_objective(ObjectiveKind::mindist);
    const auto result = kld::exchange_run(initial, *objective, cfg);
    if (result.trace.accepted_count == 0) CHECK(result.design == initial);
    // rows untouched by accepted proposals are unchanged in any case
    std::set<std::size_t> changed;
    for (std::size_t i = 0; i < initial.n(); ++i)
        if (result.design.point(i)[0] != initial.point(i)[0] ||
            result.design.point(i)[1] != initial.point(i)[1])
            changed.insert(i);
    CHECK(changed.size() <= result.trace.accepted_count);
}

TEST_CASE("stale-counter stop fires within the configured budget") {
    OptimizerConfig cfg;
    cfg.max_proposals = 100000;
    cfg.max_consecutive_rejects = 50;
    cfg.seed = 5;
    const Design initial = random_design(8, 1, 3);
    const auto objective = kld::make_objective(ObjectiveKind::entropy_nn);
    const auto result = kld::exchange_run(initial, *objective, cfg);
    CHECK(result.trace.proposals() < cfg.max_proposals);
    // the run must end with exactly max_consecutive_rejects refusals
    std::size_t trailing_rejects = 0;
    for (auto it = result.trace.entries.rbegin();
         it != result.trace.entries.rend() && !it->accepted; ++it)
        ++trailing_rejects;
    CHECK(trailing_rejects == cfg.max_consecutive_rejects);
}

TEST_CASE("final design differs from the initial one only in accepted rows") {
    OptimizerConfig cfg = OptimizerConfig::defaults(2, 64);
    cfg.max_proposals = 500;
    const Design initial = random_design(16, 2, 13);
    const auto objective = kld::make_objective(ObjectiveKind::entropy_nn);
    const auto result = kld::exchange_run(initial, *objective, cfg);

    // replay the proposal stream to recover which row each proposal touched
    SeededRng replay(cfg.seed, 0);
    std::set<std::size_t> accepted_rows;
    for (const auto& entry : result.trace.entries) {
        const std::size_t i = replay.uniform_index(initial.n());
        kld::uniform_point(replay, initial.d());
        if (entry.accepted) accepted_rows.insert(i);
    }
    for (std::size_t i = 0; i < initial.n(); ++i) {
        if (accepted_rows.count(i)) continue;
        for (std::size_t k = 0; k < initial.d(); ++k)
            REQUIRE(result.design(i, k) == initial(i, k));
    }
}

TEST_CASE("NN exchange on an initial design with duplicates propagates the signal") {
    // callers that draw initial designs themselves must redraw; multi_start
    // does, a direct exchange_run call sees the precondition violation
    Design initial = random_design(6, 2, 2);
    initial.set_point(3, initial.point(0));
    OptimizerConfig cfg = OptimizerConfig::defaults(2, 1);
    const auto objective = kld::make_objective(ObjectiveKind::entropy_nn);
    CHECK_THROWS_AS(kld::exchange_run(initial, *objective, cfg), kld::ZeroDistanceError);
}

TEST_CASE("config validation rejects zero limits") {
    OptimizerConfig cfg;
    cfg.max_proposals = 0;
    cfg.max_consecutive_rejects = 10;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    cfg.max_proposals = 10;
    cfg.max_consecutive_rejects = 0;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    cfg.max_consecutive_rejects = 5;
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
}

TEST_CASE("seeded exchange improves the KDE entropy in 19 of 20 runs") {
    std::size_t improved = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        OptimizerConfig cfg = OptimizerConfig::defaults(3, 1000 + seed);
        const Design initial = random_design(30, 3, 500 + seed);
        const auto objective = kld::make_objective(ObjectiveKind::entropy_mc_gauss);
        const auto result = kld::exchange_run(initial, *objective, cfg);
        if (result.trace.final_objective > result.trace.initial_objective) ++improved;
    }
    CHECK(improved >= 19);
}

TEST_CASE("multi-start with one restart equals a plain exchange run") {
    OptimizerConfig cfg = OptimizerConfig::defaults(2, 31);
    cfg.restarts = 1;
    const auto multi = kld::multi_start(ObjectiveKind::entropy_nn, 14, 2, cfg);

    SeededRng rng(cfg.seed, 0);
    Design initial(14, 2);
    for (std::size_t i = 0; i < 14; ++i) initial.set_point(i, kld::uniform_point(rng, 2));
    const auto objective = kld::make_objective(ObjectiveKind::entropy_nn);
    const auto single = kld::exchange_run(initial, *objective, cfg, rng);

    CHECK(multi.best == single.design);
    CHECK(multi.best_objective == single.trace.final_objective);
    CHECK(multi.traces.size() == 1);
}

TEST_CASE("multi-start returns the best restart and dominates run one") {
    OptimizerConfig cfg = OptimizerConfig::defaults(2, 77);
    cfg.restarts = 5;
    const auto multi = kld::multi_start(ObjectiveKind::entropy_mc_gauss, 20, 2, cfg);
    REQUIRE(multi.traces.size() == 5);
    for (const auto& trace : multi.traces)
        CHECK(multi.best_objective >= trace.final_objective);
    CHECK(multi.best_objective == multi.traces[multi.best_restart].final_objective);
    // best-of-5 dominates the restarts-1 result at the same seed
    OptimizerConfig one = cfg;
    one.restarts = 1;
    const auto single = kld::multi_start(ObjectiveKind::entropy_mc_gauss, 20, 2, one);
    CHECK(multi.best_objective >= single.best_objective);
}

TEST_CASE("NN objective treats a colliding candidate as invalid") {
    const Design design = random_design(9, 2, 8);
    const auto objective = kld::make_objective(ObjectiveKind::entropy_nn);
    objective->bind(design);
    const std::vector<double> clash(design.point(3).begin(), design.point(3).end());
    CHECK_FALSE(objective->propose(design, 0, clash).has_value());
}

TEST_CASE("mindist objective values") {
    const Design tri(3, 2, {0.0, 0.0, 1.0, 1.0, 0.0, 1.0});
    CHECK(kld::mindist_objective(tri) == doctest::Approx(1.0).epsilon(1e-15));
    const Design dup(2, 2, {0.4, 0.4, 0.4, 0.4});
    CHECK(kld::mindist_objective(dup) == 0.0);
}

TEST_CASE("mindist exchange strictly improves along accepted steps") {
    OptimizerConfig cfg = OptimizerConfig::defaults(3, 40);
    const Design initial = random_design(30, 3, 6);
    const auto objective = kld::make_objective(ObjectiveKind::mindist);
    const auto result = kld::exchange_run(initial, *objective, cfg);
    CHECK(result.trace.final_objective > kld::mindist_objective(initial));
    CHECK(kld::mindist_objective(result.design) ==
          doctest::Approx(result.trace.final_objective).epsilon(1e-12));
}

TEST_CASE("trace CSV export") {
    kld::Trace trace;
    trace.initial_objective = 0.5;
    trace.entries = {{1, false, 0.5}, {2, true, 0.75}};
    trace.final_objective = 0.75;
    trace.accepted_count = 1;
    std::ostringstream out;
    kld::write_trace_csv(trace, out);
    CHECK(out.str() == "proposal,accepted,objective\n1,0,0.5\n2,1,0.75\n");
}
