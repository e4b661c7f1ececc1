#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrsim/adversary.hpp"
#include "qrsim/bell.hpp"
#include "qrsim/graph.hpp"
#include "qrsim/tomography.hpp"
#include "qrsim/workload.hpp"

namespace qrsim {

struct ConnectionSpec {
    std::string id;
    NodeId from;
    NodeId to;
    double rate = 1.0; // D, pairs/s
    RepeaterModel model = EsModel{};
    int priority = 0;
    std::optional<double> reroute_rate;
};

/// Phase-3/4 capacity and maintenance attribution. When unset, the isolated
/// share defaults to the isolated fraction of the node count.
struct PhaseOverrides {
    std::optional<double> capacity_sus;
    std::optional<double> maintenance_sus;
    std::optional<double> capacity_k;
    std::optional<double> maintenance_k;
};

/// Only one shedding policy is implemented: drop the lowest-priority
/// connection, then the largest work contribution, ties by id.
enum class SheddingPolicy { PriorityThenWork };

struct ScenarioConfig {
    std::vector<NodeId> nodes;
    std::vector<LinkSpec> links;
    std::vector<ConnectionSpec> connections;
    double capacity = 100.0; // C, pairs/s
    WindowParams window;
    CostModel cost_model = ConstantCost{2500.0};
    PairAccounting accounting = PairAccounting::Squared;
    ScheduleMode schedule = PredictableMode{10};
    std::optional<HijackerSpec> hijacker;
    double verification_delay = 100.0; // seconds from detection to ground truth
    SheddingPolicy shedding = SheddingPolicy::PriorityThenWork;
    double duration = 600.0;           // seconds
    double time_step = 1.0;            // seconds per timeline record
    std::string output_dir;            // default directory for emitted files
    PhaseOverrides overrides;
};

struct TimelineRecord {
    double t = 0.0;
    int phase = 1;
    double work = 0.0;        // W (or W', W'')
    double maintenance = 0.0; // R
    double loss = 0.0;        // L: work-loss rate attributable to isolation
    double slack = 0.0;       // phase-appropriate S
    double shed_work = 0.0;   // pairs/s dropped by shedding in this phase
    std::size_t isolated = 0;
};

struct SimEvent {
    double t = 0.0;
    std::string kind;   // hijack_start, detection, isolation, reroute, shed, ...
    std::string detail;
};

struct RunSummary {
    double bootstrap_end = 0.0;
    double phase2_work = 0.0;
    double phase2_maintenance = 0.0;
    double phase2_slack = 0.0;
    std::optional<double> hijack_time;
    std::optional<double> detection_time;
    std::optional<double> detection_lag;
    std::vector<NodeId> suspects;
    std::optional<double> work_prime;          // W' before shedding
    std::optional<double> reroute_budget;      // W' - W
    std::optional<double> reroute_budget_limit; // largest W'-W with non-negative slack
    std::optional<double> slack_prime_final;   // S' after shedding
    std::vector<std::string> shed_connections;
    std::vector<NodeId> reinstated;
    std::optional<double> work_second; // W'' before phase-4 shedding
    std::optional<double> slack_second_final;
};

struct SimulationTimeline {
    std::vector<TimelineRecord> records;
    std::vector<SimEvent> events;
    RunSummary summary;
    std::uint64_t seed = 0;
    std::string scenario_hash; // filled by the caller that owns the document
};

/// Deterministic discrete-time run through phases 1-4. Identical
/// (scenario, seed) inputs produce byte-identical timelines.
SimulationTimeline run(const ScenarioConfig& scenario, std::uint64_t seed);

/// Connections to drop to recover a positive slack: lowest priority first,
/// then highest work contribution, ties broken by id. work_contribution[i]
/// belongs to ids[i]; deficit <= 0 sheds nothing.
std::vector<std::size_t> shedding_policy(const std::vector<std::string>& ids,
                                         const std::vector<int>& priorities,
                                         const std::vector<double>& work_contribution,
                                         double deficit);

std::string timeline_csv(const SimulationTimeline& timeline);
nlohmann::json events_json(const SimulationTimeline& timeline);
nlohmann::json summary_json(const SimulationTimeline& timeline);

} // namespace qrsim
