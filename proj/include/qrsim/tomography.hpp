#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qrsim/bell.hpp"
#include "qrsim/graph.hpp"
#include "qrsim/workload.hpp"

namespace qrsim {

/// Sliding-window parameters: w bursts of `burst_pairs` checked pairs at
/// mean interval m for link checks, and the (w', m') analogues for
/// connection-level checks. Intervals are jittered uniformly on
/// [m(1-j), m(1+j)] so a hijacker cannot lie low between bursts.
struct WindowParams {
    std::int64_t bursts = 200;           // w
    double mean_interval = 1.0;          // m, seconds
    std::int64_t burst_pairs = 10;       // checked pairs per burst
    std::int64_t conn_bursts = 200;      // w'
    double conn_mean_interval = 1.0;     // m'
    double jitter = 0.25;                // j, fraction of the mean interval
};

/// T = w * m.
double verification_time(std::int64_t bursts, double mean_interval);
double verification_time(const WindowParams& window);

/// Bursts needed so that one window carries at least required_pairs:
/// w = ceil(B / burst).
std::int64_t window_for_pairs(double required_pairs, std::int64_t burst_pairs);

/// M^link = B(F) E(F).
double link_check_cost(double fidelity, const CostModel& model = default_cost_model(),
                       PairAccounting accounting = PairAccounting::Squared);

/// M^con for an ES connection: product over the link level plus
/// ceil(log2 h) swap levels of B(F_l) E(F_l), where F_0 is the link
/// fidelity and F_{l+1} = F''(F_l). Throws InsufficientFidelityError when
/// any level's fidelity falls to 1/4 or below.
double es_connection_cost(std::size_t hops, double fidelity,
                          const CostModel& model = default_cost_model(),
                          PairAccounting accounting = PairAccounting::Squared);

/// M^con for a QEC connection: h B(F) E(F). Rejects hops = 0.
double qec_connection_cost(std::size_t hops, double fidelity,
                           const CostModel& model = default_cost_model(),
                           PairAccounting accounting = PairAccounting::Squared);

/// Dispatches on the connection's repeater model; the base fidelity is the
/// weakest link fidelity along its path.
double connection_check_cost(const Connection& connection, const NetworkGraph& graph,
                             const CostModel& model = default_cost_model(),
                             PairAccounting accounting = PairAccounting::Squared);

/// R = sum M^link / (w m) + sum M^con / (w' m').
double maintenance_rate(const std::vector<double>& link_costs,
                        const std::vector<double>& connection_costs,
                        const WindowParams& window);
double maintenance_rate(const NetworkGraph& graph, const std::vector<Connection>& connections,
                        const WindowParams& window, const CostModel& model = default_cost_model(),
                        PairAccounting accounting = PairAccounting::Squared);

// --- check-pair selection --------------------------------------------------

/// Contiguous per-level blocks in level order: indices [l*block, (l+1)*block)
/// go to level l. Trivially predictable; kept as the counter-example mode.
struct PredictableMode {
    std::int64_t block = 10;
};

/// Each index is assigned to one of the levels with probability
/// `probability` per level, drawn from a seeded generator. The selection is
/// indistinguishable from random to an observer without the seed.
struct SecureRandomMode {
    std::uint64_t seed = 0;
    double probability = 0.1;
};

using ScheduleMode = std::variant<PredictableMode, SecureRandomMode>;

/// Assignment of pair-sequence indices to check levels for one stream.
/// Levels are disjoint by construction and the assignment is a pure
/// function of (mode, levels, length).
class CheckSchedule {
public:
    CheckSchedule(ScheduleMode mode, std::size_t levels, std::vector<int> assignment);

    std::size_t levels() const { return levels_; }
    std::size_t length() const { return assignment_.size(); }
    /// Level of an index, or -1 when the pair goes to production.
    int level_of(std::size_t index) const { return assignment_.at(index); }
    std::vector<std::size_t> level_indices(std::size_t level) const;
    bool predictable() const { return std::holds_alternative<PredictableMode>(mode_); }
    const ScheduleMode& mode() const { return mode_; }

private:
    ScheduleMode mode_;
    std::size_t levels_;
    std::vector<int> assignment_;
};

/// Throws InsufficientStreamError when a predictable schedule does not fit,
/// and ValidationError when levels * probability exceeds 1.
CheckSchedule make_schedule(const ScheduleMode& mode, std::size_t levels,
                            std::size_t stream_length);

/// Burst start times from `start`: count intervals drawn uniformly from
/// [m(1-j), m(1+j)] with a seeded generator.
std::vector<double> burst_times(std::size_t count, double start, double mean_interval,
                                double jitter, std::uint64_t seed);

} // namespace qrsim
