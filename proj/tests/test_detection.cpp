#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>

#include "oracles.hpp"
#include "qrsim/detection.hpp"
#include "qrsim/rng.hpp"

using namespace qrsim;

namespace {

Path numbered_path(std::size_t hops) {
    Path p;
    for (std::size_t i = 0; i <= hops; ++i) p.nodes.push_back("n" + std::to_string(i));
    return p;
}

std::vector<CheckResult> results_for(const SwapTree& tree,
                                     const std::vector<Segment>& failing) {
    std::vector<CheckResult> out;
    for (const auto& node : tree.tree()) {
        const bool fail = std::find(failing.begin(), failing.end(), node.seg) != failing.end();
        out.push_back({node.seg, node.level, fail ? Verdict::Fail : Verdict::Pass, 2500});
    }
    return out;
}

std::vector<CheckResult> corrupt_all_results(const SwapTree& tree, std::size_t pos) {
    std::vector<CheckResult> out;
    for (const auto& node : tree.tree()) {
        const bool fail = node.seg.i <= pos && pos <= node.seg.j;
        out.push_back({node.seg, node.level, fail ? Verdict::Fail : Verdict::Pass, 2500});
    }
    return out;
}

} // namespace

TEST_CASE("swap tree shapes") {
    CHECK(SwapTree(numbered_path(1)).tree().size() == 1); // single link, no swaps

    const SwapTree two(numbered_path(2));
    CHECK(two.at(Segment{0, 2}).swap_node == NodeId("n1"));
    CHECK(two.at(Segment{0, 2}).level == 1);

    const SwapTree four(numbered_path(4));
    CHECK(four.at(Segment{0, 2}).swap_node == NodeId("n1"));
    CHECK(four.at(Segment{2, 4}).swap_node == NodeId("n3"));
    CHECK(four.at(Segment{0, 4}).swap_node == NodeId("n2"));
    CHECK(four.at(Segment{0, 2}).level == 1);
    CHECK(four.at(Segment{0, 4}).level == 2);
    CHECK(four.segments().size() == 7); // 4 leaves + 2 mid + root

    // Leaves are links; internal segments union their children; the root
    // spans the full path.
    for (const auto& node : four.tree()) {
        if (node.left < 0) {
            CHECK(node.seg.j - node.seg.i == 1);
        } else {
            CHECK(four.tree()[node.left].seg.i == node.seg.i);
            CHECK(four.tree()[node.right].seg.j == node.seg.j);
            CHECK(four.tree()[node.left].seg.j == four.tree()[node.right].seg.i);
        }
    }
    CHECK(four.tree()[four.root()].seg == Segment{0, 4});

    const auto chain = four.check_chain(0);
    REQUIRE(chain.size() == 3);
    CHECK(chain[0].seg == Segment{0, 1});
    CHECK(chain[0].implicated == std::vector<NodeId>{"n0", "n1"});
    CHECK(chain[1].seg == Segment{0, 2});
    CHECK(chain[1].implicated == std::vector<NodeId>{"n1"});
    CHECK(chain[2].seg == Segment{0, 4});
    CHECK(chain[2].implicated == std::vector<NodeId>{"n2"});
}

TEST_CASE("statistical verdicts") {
    CHECK(statistical_verdict(BellCoeffs(1, 0, 0, 0), 10000, 7) == Verdict::Pass);
    CHECK(statistical_verdict(hijacked_state(), 10000, 7) == Verdict::Fail);
    CHECK_THROWS_AS(statistical_verdict(hijacked_state(), 8, 7), std::invalid_argument);

    // Deterministic per seed.
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        CHECK(statistical_verdict(werner(0.9), 5000, seed) ==
              statistical_verdict(werner(0.9), 5000, seed));
    }

    // False-fail rate on the ideal state stays at or under 1e-3.
    int false_fails = 0;
    for (int seed = 0; seed < 1000; ++seed) {
        if (statistical_verdict(BellCoeffs(1, 0, 0, 0), 10000, seed) == Verdict::Fail) {
            ++false_fails;
        }
    }
    CHECK(false_fails <= 1);

    // The hijacked state is caught essentially always at this sample size.
    int missed = 0;
    for (int seed = 0; seed < 200; ++seed) {
        if (statistical_verdict(hijacked_state(), 10000, seed) == Verdict::Pass) ++missed;
    }
    CHECK(missed == 0);

    // Near the violation threshold the verdict is genuinely borderline;
    // record the split without asserting it.
    int near_fails = 0;
    for (int seed = 0; seed < 200; ++seed) {
        if (statistical_verdict(werner(0.78), 10000, seed) == Verdict::Fail) ++near_fails;
    }
    std::printf("werner(0.78) at n=10^4: %d fails / 200 seeds\n", near_fails);
}

TEST_CASE("ES identification from minimal failing evidence") {
    const SwapTree tree(numbered_path(4));

    // Only the end-to-end check fails: the top swap node did it.
    const auto top = identify_es(tree, results_for(tree, {Segment{0, 4}}));
    CHECK(top.candidates == std::vector<NodeId>{"n2"});
    CHECK(top.tag == SuspectReport::Tag::Identified);

    // All pass: nothing to report.
    const auto clean = identify_es(tree, results_for(tree, {}));
    CHECK(clean.candidates.empty());

    // A failing mid segment (with the root failing consistently above it).
    const auto mid = identify_es(tree, results_for(tree, {Segment{0, 2}, Segment{0, 4}}));
    CHECK(mid.candidates == std::vector<NodeId>{"n1"});
    CHECK(mid.tag == SuspectReport::Tag::Identified);

    // A failing leaf implicates both link endpoints.
    const auto leaf = identify_es(
        tree, results_for(tree, {Segment{3, 4}, Segment{2, 4}, Segment{0, 4}}));
    CHECK(leaf.candidates == std::vector<NodeId>{"n3", "n4"});
    CHECK(leaf.tag == SuspectReport::Tag::Narrowed);

    // Disjoint minimal failures (two framed victims) report the union.
    const auto framed = identify_es(
        tree, results_for(tree, {Segment{0, 2}, Segment{2, 4}, Segment{0, 4}}));
    CHECK(framed.candidates == std::vector<NodeId>{"n1", "n3"});
    CHECK(framed.tag == SuspectReport::Tag::Narrowed);

    // Pass above a fail is contradictory: reported, tagged undetermined.
    const auto odd = identify_es(tree, results_for(tree, {Segment{0, 2}}));
    CHECK(odd.tag == SuspectReport::Tag::Undetermined);
    CHECK_FALSE(odd.candidates.empty());

    // Coverage is mandatory.
    auto partial = results_for(tree, {});
    partial.pop_back();
    CHECK_THROWS_AS(identify_es(tree, partial), std::invalid_argument);
}

TEST_CASE("ES identification matches the single-culprit consistency oracle") {
    for (std::size_t hops = 2; hops <= 8; ++hops) {
        const SwapTree tree(numbered_path(hops));
        for (std::size_t pos = 1; pos < hops; ++pos) {
            const auto results = corrupt_all_results(tree, pos);
            const auto report = identify_es(tree, results);
            CHECK(report.tag == SuspectReport::Tag::Identified);
            REQUIRE(report.candidates.size() == 1);
            CHECK(report.candidates[0] == "n" + std::to_string(pos));

            // Cross-check with the hypothesis-enumeration oracle.
            std::vector<std::pair<std::size_t, std::size_t>> segs;
            std::vector<bool> failed;
            for (const auto& r : results) {
                segs.emplace_back(r.seg.i, r.seg.j);
                failed.push_back(r.verdict == Verdict::Fail);
            }
            const auto culprits = oracles::consistent_culprits(hops, segs, failed);
            REQUIRE(culprits.size() == 1);
            CHECK(culprits[0] == pos);
        }
    }
}

TEST_CASE("QEC identification") {
    // Two failing connections sharing exactly one interior node.
    Path aa;
    aa.nodes = {"a", "x", "k", "y", "a'"};
    Path bb;
    bb.nodes = {"b", "u", "k", "v", "b'"};
    const auto shared = identify_qec({{aa, Verdict::Fail}, {bb, Verdict::Fail}});
    CHECK(shared.candidates == std::vector<NodeId>{"k"});
    CHECK(shared.tag == SuspectReport::Tag::Identified);

    // One failing five-hop connection: four interior candidates.
    Path five = numbered_path(5);
    const auto wide = identify_qec({{five, Verdict::Fail}});
    CHECK(wide.candidates.size() == 4);
    CHECK(wide.tag == SuspectReport::Tag::Narrowed);

    // A two-hop connection pins its middle node.
    Path two = numbered_path(2);
    const auto mid = identify_qec({{two, Verdict::Fail}});
    CHECK(mid.candidates == std::vector<NodeId>{"n1"});
    CHECK(mid.tag == SuspectReport::Tag::Identified);

    // All passing: undetermined, no candidates.
    const auto quiet = identify_qec({{two, Verdict::Pass}});
    CHECK(quiet.candidates.empty());
    CHECK(quiet.tag == SuspectReport::Tag::Undetermined);
    CHECK_THROWS_AS(identify_qec({}), std::invalid_argument);
}

TEST_CASE("QEC identification never blames interior nodes of passing connections") {
    SplitMix64 rng(61);
    for (int round = 0; round < 100; ++round) {
        std::vector<EndToEndCheck> checks;
        const int count = 2 + static_cast<int>(rng.below(3));
        for (int c = 0; c < count; ++c) {
            Path p;
            const int hops = 2 + static_cast<int>(rng.below(4));
            for (int i = 0; i <= hops; ++i) {
                p.nodes.push_back("m" + std::to_string(rng.below(8)) + "_" + std::to_string(i));
            }
            // Shared spine node so intersections are non-trivial.
            p.nodes[1 + rng.below(static_cast<std::uint64_t>(hops - 1))] = "spine";
            checks.push_back({p, rng.below(2) ? Verdict::Fail : Verdict::Pass});
        }
        if (std::none_of(checks.begin(), checks.end(), [](const EndToEndCheck& c) {
                return c.verdict == Verdict::Fail;
            })) {
            continue;
        }
        const auto report = identify_qec(checks);
        for (const auto& check : checks) {
            if (check.verdict != Verdict::Pass) continue;
            for (const auto& n : check.path.interior()) {
                CHECK(std::find(report.candidates.begin(), report.candidates.end(), n) ==
                      report.candidates.end());
            }
        }
    }
}

TEST_CASE("check log round trip") {
    const SwapTree tree(numbered_path(4));
    const auto results = corrupt_all_results(tree, 2);
    const auto doc = es_check_log(tree, results);
    const auto parsed = parse_check_log(doc);
    REQUIRE(parsed.is_es);
    const auto report = identify_es(*parsed.tree, parsed.results);
    CHECK(report.candidates == std::vector<NodeId>{"n2"});

    Path aa;
    aa.nodes = {"a", "k", "a'"};
    const auto qec_doc = qec_check_log({{aa, Verdict::Fail}});
    const auto qec_parsed = parse_check_log(qec_doc);
    REQUIRE_FALSE(qec_parsed.is_es);
    CHECK(identify_qec(qec_parsed.qec_checks).candidates == std::vector<NodeId>{"k"});

    CHECK_THROWS_AS(parse_check_log(nlohmann::json{{"model", "weird"}}), ValidationError);
    const auto rpt = report_json(report);
    CHECK(rpt.at("tag") == "identified");
}
