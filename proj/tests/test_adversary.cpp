#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "qrsim/adversary.hpp"
#include "qrsim/rng.hpp"

using namespace qrsim;

namespace {

// The framing walkthrough path: a - H - b - c. The hijacker H swaps a-b;
// b swaps the end-to-end a-c pairs.
Path frame_path() {
    Path p;
    p.nodes = {"a", "H", "b", "c"};
    return p;
}

PairStream stream_for(const Path& path, std::size_t leaf, std::size_t length) {
    PairStream s;
    s.path = path;
    s.length = length;
    s.chain = SwapTree(path).check_chain(leaf);
    return s;
}

HijackerSpec hijacker(Strategy strategy, Knowledge knowledge,
                      std::uint64_t seed = 0) {
    HijackerSpec spec;
    spec.node = "H";
    spec.strategy = std::move(strategy);
    spec.knowledge = knowledge;
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("corrupt-all touches the whole stream") {
    const PairStream stream = stream_for(frame_path(), 0, 100);
    const CheckSchedule schedule = make_schedule(PredictableMode{10}, 3, 100);
    const auto hit = corrupt_stream(hijacker(CorruptAll{}, Knowledge::Blind), schedule, stream);
    CHECK(hit.size() == 100);

    HijackerSpec off_path = hijacker(CorruptAll{}, Knowledge::Blind);
    off_path.node = "zzz";
    CHECK_THROWS_AS(corrupt_stream(off_path, schedule, stream), std::invalid_argument);
}

TEST_CASE("target-connection corrupts only its own stream") {
    PairStream mine = stream_for(frame_path(), 0, 50);
    mine.connection_id = "c1";
    PairStream other = mine;
    other.connection_id = "c2";
    const CheckSchedule schedule = make_schedule(PredictableMode{10}, 3, 50);
    const auto spec = hijacker(TargetConnection{"c1"}, Knowledge::Blind);
    CHECK(corrupt_stream(spec, schedule, mine).size() == 50);
    CHECK(corrupt_stream(spec, schedule, other).empty());
}

TEST_CASE("schedule-aware framing corrupts exactly the victim's block") {
    // Blocks: 0-9 link (a,H), 10-19 the a-b check (implicates H),
    // 20-29 the a-c check (implicates b).
    const PairStream stream = stream_for(frame_path(), 0, 100);
    const CheckSchedule schedule = make_schedule(PredictableMode{10}, 3, 100);
    const auto spec = hijacker(Frame{"b"}, Knowledge::KnowsSchedule);
    const auto hit = corrupt_stream(spec, schedule, stream);
    REQUIRE(hit.size() == 10);
    CHECK(hit.front() == 20);
    CHECK(hit.back() == 29);

    // A predictable schedule is aimable even without the seed.
    CHECK(corrupt_stream(hijacker(Frame{"b"}, Knowledge::Blind), schedule, stream) == hit);

    // Never the hijacker's own levels.
    for (std::size_t idx : hit) {
        const int level = schedule.level_of(idx);
        REQUIRE(level >= 0);
        const auto& implicated = stream.chain[static_cast<std::size_t>(level)].implicated;
        CHECK(std::find(implicated.begin(), implicated.end(), "H") == implicated.end());
    }
}

TEST_CASE("blind framing against a secure schedule is schedule-independent") {
    const PairStream stream = stream_for(frame_path(), 0, 100000);
    const CheckSchedule schedule =
        make_schedule(SecureRandomMode{5, 0.1}, 3, 100000);
    const auto spec = hijacker(Frame{"b", 0.3}, Knowledge::Blind, 99);
    CHECK(framing_infeasible(spec, schedule));
    const auto hit = corrupt_stream(spec, schedule, stream);
    const std::set<std::size_t> hit_set(hit.begin(), hit.end());

    // Chi-square independence: corruption rate per schedule category.
    std::vector<double> observed(4, 0.0);
    std::vector<double> totals(4, 0.0);
    for (std::size_t i = 0; i < stream.length; ++i) {
        const int level = schedule.level_of(i);
        const std::size_t cat = level < 0 ? 3 : static_cast<std::size_t>(level);
        totals[cat] += 1.0;
        if (hit_set.count(i)) observed[cat] += 1.0;
    }
    const double rate = static_cast<double>(hit.size()) / static_cast<double>(stream.length);
    std::vector<double> expected;
    for (double t : totals) expected.push_back(t * rate);
    CHECK(oracles::chi_square(observed, expected) < 11.345); // 0.99 quantile, df 3

    // Determinism per hijacker seed.
    CHECK(corrupt_stream(spec, schedule, stream) == hit);
}

TEST_CASE("lay-low gating restricts corruption to active intervals") {
    PairStream stream = stream_for(frame_path(), 0, 100);
    stream.start_time = 0.0;
    stream.seconds_per_pair = 1.0;
    const CheckSchedule schedule = make_schedule(PredictableMode{10}, 3, 100);
    HijackerSpec spec = hijacker(CorruptAll{}, Knowledge::Blind);
    spec.active_intervals = {{10.0, 20.0}, {50.0, 55.0}};
    const auto hit = corrupt_stream(spec, schedule, stream);
    CHECK(hit.size() == 15);
    for (std::size_t idx : hit) {
        const bool inside = (idx >= 10 && idx < 20) || (idx >= 50 && idx < 55);
        CHECK(inside);
    }
    CHECK(hijacker_active(spec, 12.0));
    CHECK_FALSE(hijacker_active(spec, 30.0));
}

TEST_CASE("effective state swaps in the attack marginal") {
    const BellCoeffs base = werner(0.9);
    CHECK(effective_state(base, false).fidelity() == doctest::Approx(0.9));
    const BellCoeffs bad = effective_state(base, true);
    const auto traced = oracles::traced_attack_state();
    for (int k = 0; k < 4; ++k) {
        CHECK(bad.components()[k] == doctest::Approx(traced[k]).epsilon(1e-12));
    }
    CHECK(chsh(bad) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("framing outcome under a predictable schedule blames the victim") {
    FramingScenario scenario;
    scenario.path = frame_path();
    scenario.hijacker = hijacker(Frame{"b"}, Knowledge::Blind);
    scenario.check_state = two_round_pipeline(0.9).twice;
    scenario.pairs_per_level = 2500;
    scenario.schedule = PredictableMode{2500};

    int framed = 0;
    for (int seed = 0; seed < 100; ++seed) {
        scenario.seed = static_cast<std::uint64_t>(seed);
        scenario.hijacker.seed = static_cast<std::uint64_t>(seed) + 1000;
        const auto outcome = framing_outcome(scenario);
        CHECK_FALSE(outcome.infeasible);
        const auto& blamed = outcome.blamed.candidates;
        CHECK(std::find(blamed.begin(), blamed.end(), "H") == blamed.end());
        if (blamed == std::vector<NodeId>{"b"}) ++framed;
    }
    CHECK(framed == 100);
}

TEST_CASE("framing outcome under a secure schedule implicates the hijacker") {
    FramingScenario scenario;
    scenario.path = frame_path();
    scenario.hijacker = hijacker(Frame{"b"}, Knowledge::Blind);
    scenario.check_state = two_round_pipeline(0.9).twice;
    scenario.pairs_per_level = 2500;
    scenario.schedule = SecureRandomMode{7, 0.25};

    int caught = 0;
    for (int seed = 0; seed < 100; ++seed) {
        scenario.seed = static_cast<std::uint64_t>(seed);
        scenario.hijacker.seed = static_cast<std::uint64_t>(seed) + 2000;
        const auto outcome = framing_outcome(scenario);
        CHECK(outcome.infeasible);
        const auto& blamed = outcome.blamed.candidates;
        if (std::find(blamed.begin(), blamed.end(), "H") != blamed.end()) ++caught;
    }
    CHECK(caught >= 99);

    // With the generator seed leaked, even a secure schedule is aimable.
    scenario.hijacker = hijacker(Frame{"b"}, Knowledge::KnowsSchedule, 5);
    scenario.seed = 5;
    const auto leak = framing_outcome(scenario);
    CHECK_FALSE(leak.infeasible);
    CHECK(leak.blamed.candidates == std::vector<NodeId>{"b"});
}

TEST_CASE("framing requires a shared check level") {
    FramingScenario scenario;
    scenario.path = frame_path();
    scenario.hijacker = hijacker(Frame{"a"}, Knowledge::KnowsSchedule);
    scenario.check_state = two_round_pipeline(0.9).twice;
    // Every check implicating end node a also implicates H (their link).
    CHECK_THROWS_AS(framing_outcome(scenario), ValidationError);
}

TEST_CASE("QEC framing blames nodes unique to the corrupted connection") {
    Path dd;
    dd.nodes = {"d", "x", "H", "y", "d'"};
    Path ee;
    ee.nodes = {"e", "u", "H", "f", "e'"};
    const auto report = framing_outcome_qec({dd, ee}, 1);
    CHECK(report.candidates == std::vector<NodeId>{"f", "u"});
    CHECK(std::find(report.candidates.begin(), report.candidates.end(), "H") ==
          report.candidates.end());
    CHECK_THROWS_AS(framing_outcome_qec({dd}, 5), std::invalid_argument);
}
