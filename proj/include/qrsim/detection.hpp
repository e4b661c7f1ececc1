#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrsim/bell.hpp"
#include "qrsim/graph.hpp"

namespace qrsim {

/// Span of path node indices [i, j] covered by one checked Bell pair.
struct Segment {
    std::size_t i = 0;
    std::size_t j = 0;
    friend auto operator<=>(const Segment&, const Segment&) = default;
};

/// Nested entanglement-swapping structure over a path. Segments split at
/// mid = ceil((i+j)/2); the node at the split performs the swap. Leaves are
/// links (level 0); an internal segment's level is one above its children.
class SwapTree {
public:
    explicit SwapTree(Path path);

    struct Node {
        Segment seg;
        int level = 0;
        std::optional<NodeId> swap_node; // empty for leaves
        int left = -1;
        int right = -1;
    };

    const Path& path() const { return path_; }
    const std::vector<Node>& tree() const { return nodes_; }
    int root() const { return root_; }
    const Node& at(const Segment& seg) const;
    bool has(const Segment& seg) const;

    /// Every segment in the tree, sorted.
    std::vector<Segment> segments() const;

    /// The chain of segments consuming pairs of the given leaf link, from
    /// the link itself up to the root. Chain position l is the check level
    /// a per-stream schedule refers to.
    struct ChainLevel {
        Segment seg;
        int level = 0;
        std::vector<NodeId> implicated; // swap node, or both endpoints for the leaf
    };
    std::vector<ChainLevel> check_chain(std::size_t leaf_link_index) const;

private:
    int build(std::size_t i, std::size_t j);

    Path path_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

enum class Verdict { Pass, Fail };

struct CheckResult {
    Segment seg;
    int level = 0;
    Verdict verdict = Verdict::Pass;
    long samples = 0;
};

struct SuspectReport {
    enum class Tag { Identified, Narrowed, Undetermined };
    std::vector<NodeId> candidates; // sorted
    Tag tag = Tag::Undetermined;
};

/// Minimum trials accepted by statistical_verdict.
inline constexpr long kMinVerdictTrials = 16;

/// Simulates `trials` CHSH rounds against the state (uniformly random basis
/// combination per round, outcomes drawn from the correlation), estimates
/// S-hat, and fails when the whole margin_sigmas confidence interval sits
/// below 2. Deterministic per seed.
Verdict statistical_verdict(const BellCoeffs& state, long trials, std::uint64_t seed,
                            double margin_sigmas = 3.0, const ChshAngles& angles = {});

/// Process of elimination over a full set of per-segment results. A failing
/// segment whose children all pass is minimal evidence: an internal one
/// implicates its swapping node, a failing leaf implicates both link
/// endpoints. Under the single-hijacker model the minimal findings must
/// share a culprit, so candidates are their intersection; when the findings
/// are disjoint (several framed victims) the union is reported as narrowed.
/// A Pass above a Fail is inconsistent and tagged undetermined, never
/// silently resolved.
SuspectReport identify_es(const SwapTree& tree, const std::vector<CheckResult>& results);

struct EndToEndCheck {
    Path path;
    Verdict verdict = Verdict::Pass;
};

/// QEC-side identification from end-to-end verdicts only: intersect the
/// failing paths, remove interior nodes of passing paths and the failing
/// paths' termini.
SuspectReport identify_qec(const std::vector<EndToEndCheck>& checks);

// --- check-log serialization (consumed by the analyze command) -------------

nlohmann::json es_check_log(const SwapTree& tree, const std::vector<CheckResult>& results);
nlohmann::json qec_check_log(const std::vector<EndToEndCheck>& checks);

struct ParsedCheckLog {
    std::optional<SwapTree> tree;
    std::vector<CheckResult> results;
    std::vector<EndToEndCheck> qec_checks;
    bool is_es = true;
};

ParsedCheckLog parse_check_log(const nlohmann::json& doc);

/// Identification report for either model, as emitted by the CLI.
nlohmann::json report_json(const SuspectReport& report);

} // namespace qrsim
