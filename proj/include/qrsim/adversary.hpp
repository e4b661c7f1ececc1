#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qrsim/detection.hpp"
#include "qrsim/tomography.hpp"

namespace qrsim {

enum class Knowledge { KnowsSchedule, Blind };

/// Corrupts every pair whose creation chain passes through the hijacker.
struct CorruptAll {};

/// Corrupts only pairs belonging to one connection.
struct TargetConnection {
    std::string connection_id;
};

/// Corrupts exactly the pairs scheduled for checks that implicate the
/// victim while leaving checks that implicate the hijacker clean. Without
/// schedule knowledge the corruption cannot be aimed and lands uniformly at
/// blind_rate instead.
struct Frame {
    NodeId victim;
    double blind_rate = 0.9;
};

using Strategy = std::variant<CorruptAll, TargetConnection, Frame>;

struct HijackerSpec {
    NodeId node;
    Strategy strategy;
    Knowledge knowledge = Knowledge::Blind;
    /// Lay-low gating: when non-empty, the hijacker only acts inside these
    /// [begin, end) intervals (seconds). Composes with any strategy.
    std::vector<std::pair<double, double>> active_intervals;
    double start_time = 0.0;
    std::uint64_t seed = 0;
};

bool hijacker_active(const HijackerSpec& spec, double t);

/// One link's Bell-pair sequence together with the chain of checks its
/// pairs feed, level by level (link check first, then each swap above it).
struct PairStream {
    std::string connection_id;
    Path path;
    std::size_t length = 0;
    std::vector<SwapTree::ChainLevel> chain;
    double start_time = 0.0;
    double seconds_per_pair = 0.0; // t(i) = start_time + i * seconds_per_pair
};

/// Indices of the stream the hijacker corrupts, sorted. The hijacker must
/// sit on the stream's path; corruption only ever touches pairs it handles.
std::vector<std::size_t> corrupt_stream(const HijackerSpec& spec, const CheckSchedule& schedule,
                                        const PairStream& stream);

/// A corrupted pair is the traced-out marginal of the entangling attack;
/// a clean pair keeps its base state.
BellCoeffs effective_state(const BellCoeffs& base, bool corrupted);

/// True when a Frame strategy cannot be aimed: blind knowledge against a
/// secure-random schedule. The attempt is permitted but flagged.
bool framing_infeasible(const HijackerSpec& spec, const CheckSchedule& schedule);

/// End-to-end framing experiment on one ES path: schedule the stream's
/// checks, apply the hijacker's corruption, draw a statistical verdict per
/// tree segment, and run identification.
struct FramingScenario {
    Path path;
    HijackerSpec hijacker;
    BellCoeffs check_state{1.0, 0.0, 0.0, 0.0}; // state of uncorrupted checked pairs
    long pairs_per_level = 2500;
    ScheduleMode schedule = PredictableMode{2500};
    std::uint64_t seed = 0;
};

struct FramingOutcome {
    SuspectReport blamed;
    std::vector<CheckResult> results;
    bool infeasible = false;
};

FramingOutcome framing_outcome(const FramingScenario& scenario);

/// QEC-side framing: the hijacker carries several connections and corrupts
/// one. Returns the blame that end-to-end verdicts produce.
SuspectReport framing_outcome_qec(const std::vector<Path>& carried,
                                  std::size_t corrupted_index);

} // namespace qrsim
