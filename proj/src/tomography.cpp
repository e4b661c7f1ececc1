#include "qrsim/tomography.hpp"

#include <algorithm>
#include <cmath>

#include "qrsim/rng.hpp"

namespace qrsim {

double verification_time(std::int64_t bursts, double mean_interval) {
    if (bursts <= 0) throw std::invalid_argument("window size must be positive");
    if (!(mean_interval > 0.0)) throw std::invalid_argument("burst interval must be positive");
    return static_cast<double>(bursts) * mean_interval;
}

double verification_time(const WindowParams& window) {
    return verification_time(window.bursts, window.mean_interval);
}

std::int64_t window_for_pairs(double required_pairs, std::int64_t burst_pairs) {
    if (!(required_pairs > 0.0) || burst_pairs <= 0) {
        throw std::invalid_argument("window sizing needs positive pair counts");
    }
    return static_cast<std::int64_t>(
        std::ceil(required_pairs / static_cast<double>(burst_pairs)));
}

double link_check_cost(double fidelity, const CostModel& model, PairAccounting accounting) {
    const double b = tomography_sample_count(fidelity, model);
    const double e = two_round_pipeline(fidelity, accounting).expected_pairs;
    return b * e;
}

double es_connection_cost(std::size_t hops, double fidelity, const CostModel& model,
                          PairAccounting accounting) {
    if (hops == 0) throw std::invalid_argument("a connection spans at least one hop");
    // Link level plus ceil(log2 h) swap levels.
    std::size_t swap_levels = 0;
    for (std::size_t span = 1; span < hops; span *= 2) ++swap_levels;
    double cost = 1.0;
    double f = fidelity;
    for (std::size_t level = 0; level <= swap_levels; ++level) {
        if (!(f > 0.25)) {
            throw InsufficientFidelityError("fidelity fell to 1/4 at check level " +
                                            std::to_string(level));
        }
        const PipelineResult p = two_round_pipeline(f, accounting);
        cost *= tomography_sample_count(f, model) * p.expected_pairs;
        f = p.f_twice;
    }
    return cost;
}

double qec_connection_cost(std::size_t hops, double fidelity, const CostModel& model,
                           PairAccounting accounting) {
    if (hops == 0) throw std::invalid_argument("a connection spans at least one hop");
    return static_cast<double>(hops) * link_check_cost(fidelity, model, accounting);
}

double connection_check_cost(const Connection& connection, const NetworkGraph& graph,
                             const CostModel& model, PairAccounting accounting) {
    double f = 1.0;
    const auto& nodes = connection.path.nodes;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        f = std::min(f, graph.link_fidelity(nodes[i], nodes[i + 1]));
    }
    if (std::holds_alternative<EsModel>(connection.model)) {
        return es_connection_cost(connection.path.hops(), f, model, accounting);
    }
    return qec_connection_cost(connection.path.hops(), f, model, accounting);
}

double maintenance_rate(const std::vector<double>& link_costs,
                        const std::vector<double>& connection_costs,
                        const WindowParams& window) {
    double rate = 0.0;
    const double link_window = verification_time(window.bursts, window.mean_interval);
    for (double m : link_costs) rate += m / link_window;
    if (!connection_costs.empty()) {
        const double conn_window = verification_time(window.conn_bursts, window.conn_mean_interval);
        for (double m : connection_costs) rate += m / conn_window;
    }
    return rate;
}

double maintenance_rate(const NetworkGraph& graph, const std::vector<Connection>& connections,
                        const WindowParams& window, const CostModel& model,
                        PairAccounting accounting) {
    std::vector<double> link_costs;
    for (const auto& [key, link] : graph.links()) {
        link_costs.push_back(link_check_cost(link.fidelity, model, accounting));
    }
    std::vector<double> conn_costs;
    for (const Connection& c : connections) {
        conn_costs.push_back(connection_check_cost(c, graph, model, accounting));
    }
    return maintenance_rate(link_costs, conn_costs, window);
}

CheckSchedule::CheckSchedule(ScheduleMode mode, std::size_t levels, std::vector<int> assignment)
    : mode_(mode), levels_(levels), assignment_(std::move(assignment)) {}

std::vector<std::size_t> CheckSchedule::level_indices(std::size_t level) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
        if (assignment_[i] == static_cast<int>(level)) out.push_back(i);
    }
    return out;
}

CheckSchedule make_schedule(const ScheduleMode& mode, std::size_t levels,
                            std::size_t stream_length) {
    if (levels == 0) throw std::invalid_argument("a schedule needs at least one check level");
    std::vector<int> assignment(stream_length, -1);
    if (const auto* pred = std::get_if<PredictableMode>(&mode)) {
        if (pred->block <= 0) throw std::invalid_argument("block size must be positive");
        const std::size_t block = static_cast<std::size_t>(pred->block);
        if (levels * block > stream_length) {
            throw InsufficientStreamError("stream of " + std::to_string(stream_length) +
                                          " pairs cannot hold " + std::to_string(levels) +
                                          " blocks of " + std::to_string(block));
        }
        for (std::size_t l = 0; l < levels; ++l) {
            for (std::size_t i = l * block; i < (l + 1) * block; ++i) {
                assignment[i] = static_cast<int>(l);
            }
        }
    } else {
        const auto& sec = std::get<SecureRandomMode>(mode);
        if (!(sec.probability > 0.0) || sec.probability * static_cast<double>(levels) > 1.0) {
            throw ValidationError("per-level selection probability must satisfy 0 < levels*p <= 1");
        }
        SplitMix64 rng(sec.seed);
        for (std::size_t i = 0; i < stream_length; ++i) {
            const double u = rng.uniform();
            if (u < sec.probability * static_cast<double>(levels)) {
                assignment[i] = static_cast<int>(u / sec.probability);
            }
        }
    }
    return CheckSchedule(mode, levels, std::move(assignment));
}

std::vector<double> burst_times(std::size_t count, double start, double mean_interval,
                                double jitter, std::uint64_t seed) {
    if (!(mean_interval > 0.0)) throw std::invalid_argument("burst interval must be positive");
    if (jitter < 0.0 || jitter >= 1.0) throw std::invalid_argument("jitter fraction must lie in [0, 1)");
    std::vector<double> times;
    times.reserve(count);
    SplitMix64 rng(seed);
    double t = start;
    for (std::size_t i = 0; i < count; ++i) {
        times.push_back(t);
        const double u = 2.0 * rng.uniform() - 1.0;
        t += mean_interval * (1.0 + jitter * u);
    }
    return times;
}

} // namespace qrsim
