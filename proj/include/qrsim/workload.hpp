#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qrsim/graph.hpp"

namespace qrsim {

/// Purification/entanglement-swapping repeater chain: per-node overhead
/// grows as h^c with the path hop count.
struct EsModel {
    double path_exponent = 1.0; // c
};

/// Error-corrected repeater chain: per-node overhead is the code distance.
struct QecModel {
    int code_distance = 1; // d
};

using RepeaterModel = std::variant<EsModel, QecModel>;

struct Connection {
    std::string id;
    NodeId from;
    NodeId to;
    Path path;
    double rate = 1.0; // D, delivered Bell pairs per second
    RepeaterModel model;
    int priority = 0;
    std::optional<double> reroute_rate; // D' after rerouting; defaults to rate
};

/// Per-node overhead H for one connection. Identical at every node on the
/// path: ES gives h^c, QEC gives d.
double hop_overhead(const Connection& c);

/// W_k: sum of H*D over connections whose path contains the node, termini
/// included. Excludes tomography.
double node_work(const NodeId& node, const std::vector<Connection>& connections);

/// W = sum over nodes of W_k; equivalently sum over connections of (h+1)*H*D.
double network_work(const std::vector<Connection>& connections);

struct WorkLedger {
    std::map<NodeId, double> per_node; // W_k
    double total = 0.0;                // W
    double loss = 0.0;                 // L
    double capacity = 0.0;             // C
};

WorkLedger make_ledger(const std::vector<Connection>& connections, double capacity);

/// Work lost over duration t when the suspect set is cut out: each
/// connection crossing the suspects contributes (h+1)*H*D*t exactly once.
double work_loss(const std::set<NodeId>& suspects, const std::vector<Connection>& connections,
                 double t);

/// W' = W - L_sus + sum over rerouted connections of (h+1+delta)*H'*D'.
/// H' uses the post-reroute hop count; shed connections contribute nothing;
/// outcomes[i] must describe connections[i].
double rerouted_work(double prev_work, const std::set<NodeId>& suspects,
                     const std::vector<Connection>& connections,
                     const std::vector<RerouteOutcome>& outcomes);

/// S = C - W - R. May go negative, which signals work shedding.
double slack(double capacity, double work, double maintenance);
/// S' = (C - C_sus) - W' - (R - R_sus).
double slack_prime(double capacity, double capacity_sus, double work_prime, double maintenance,
                   double maintenance_sus);
/// S'' = (C - C_k) - W'' - (R - R_k).
double slack_second(double capacity, double capacity_k, double work_second, double maintenance,
                    double maintenance_k);

} // namespace qrsim
