#include "qrsim/workload.hpp"

#include <cmath>

namespace qrsim {

namespace {

double overhead_for_hops(const RepeaterModel& model, std::size_t hops) {
    if (const auto* es = std::get_if<EsModel>(&model)) {
        return std::pow(static_cast<double>(hops), es->path_exponent);
    }
    return static_cast<double>(std::get<QecModel>(model).code_distance);
}

bool crosses(const Connection& c, const std::set<NodeId>& suspects) {
    for (const NodeId& n : c.path.nodes) {
        if (suspects.count(n)) return true;
    }
    return false;
}

} // namespace

double hop_overhead(const Connection& c) { return overhead_for_hops(c.model, c.path.hops()); }

double node_work(const NodeId& node, const std::vector<Connection>& connections) {
    double w = 0.0;
    for (const Connection& c : connections) {
        if (c.path.contains(node)) w += hop_overhead(c) * c.rate;
    }
    return w;
}

double network_work(const std::vector<Connection>& connections) {
    double w = 0.0;
    for (const Connection& c : connections) {
        w += static_cast<double>(c.path.hops() + 1) * hop_overhead(c) * c.rate;
    }
    return w;
}

WorkLedger make_ledger(const std::vector<Connection>& connections, double capacity) {
    WorkLedger ledger;
    ledger.capacity = capacity;
    for (const Connection& c : connections) {
        const double hd = hop_overhead(c) * c.rate;
        for (const NodeId& n : c.path.nodes) ledger.per_node[n] += hd;
    }
    for (const auto& [n, w] : ledger.per_node) ledger.total += w;
    return ledger;
}

double work_loss(const std::set<NodeId>& suspects, const std::vector<Connection>& connections,
                 double t) {
    if (t < 0.0) throw std::invalid_argument("loss duration must be non-negative");
    double loss = 0.0;
    for (const Connection& c : connections) {
        if (!crosses(c, suspects)) continue;
        loss += static_cast<double>(c.path.hops() + 1) * hop_overhead(c) * c.rate * t;
    }
    return loss;
}

double rerouted_work(double prev_work, const std::set<NodeId>& suspects,
                     const std::vector<Connection>& connections,
                     const std::vector<RerouteOutcome>& outcomes) {
    if (connections.size() != outcomes.size()) {
        throw std::invalid_argument("one reroute outcome is required per connection");
    }
    double w = prev_work - work_loss(suspects, connections, 1.0);
    for (std::size_t i = 0; i < connections.size(); ++i) {
        const Connection& c = connections[i];
        const RerouteOutcome& out = outcomes[i];
        if (out.kind != RerouteOutcome::Kind::Rerouted) continue;
        const std::size_t new_hops = c.path.hops() + out.delta;
        const double h_prime = overhead_for_hops(c.model, new_hops);
        const double d_prime = c.reroute_rate.value_or(c.rate);
        w += static_cast<double>(c.path.hops() + 1 + out.delta) * h_prime * d_prime;
    }
    return w;
}

double slack(double capacity, double work, double maintenance) {
    return capacity - work - maintenance;
}

double slack_prime(double capacity, double capacity_sus, double work_prime, double maintenance,
                   double maintenance_sus) {
    return (capacity - capacity_sus) - work_prime - (maintenance - maintenance_sus);
}

double slack_second(double capacity, double capacity_k, double work_second, double maintenance,
                    double maintenance_k) {
    return (capacity - capacity_k) - work_second - (maintenance - maintenance_k);
}

} // namespace qrsim
