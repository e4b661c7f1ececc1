#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qrsim/errors.hpp"

namespace qrsim {

using NodeId = std::string;

/// Node taxonomy by active degree: >=3 Router, 2 Repeater, 1 End node.
enum class NodeKind { Router, Repeater, EndNode };

struct LinkSpec {
    NodeId a;
    NodeId b;
    double cost = 1.0;
    double fidelity = 1.0;
};

struct Path {
    std::vector<NodeId> nodes;

    std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
    bool contains(const NodeId& n) const;
    /// All nodes except the two termini.
    std::vector<NodeId> interior() const;
};

/// Undirected simple graph with per-link cost and base fidelity. Values are
/// immutable after construction; isolation produces a derived graph whose
/// routing never traverses isolated nodes.
class NetworkGraph {
public:
    NetworkGraph() = default;

    /// Validates: no self loops, no duplicate links, link costs > 0,
    /// fidelities in (0.25, 1], endpoints known.
    static NetworkGraph build(std::vector<NodeId> nodes, const std::vector<LinkSpec>& links);

    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::set<NodeId>& isolated() const { return isolated_; }
    const std::map<std::pair<NodeId, NodeId>, LinkSpec>& links() const { return links_; }

    bool has_node(const NodeId& n) const;
    bool is_isolated(const NodeId& n) const { return isolated_.count(n) > 0; }
    bool has_link(const NodeId& a, const NodeId& b) const;

    double link_cost(const NodeId& a, const NodeId& b) const;
    double link_fidelity(const NodeId& a, const NodeId& b) const;

    /// Neighbors reachable over live links (neither endpoint isolated), sorted.
    std::vector<NodeId> active_neighbors(const NodeId& n) const;
    /// Count of live incident links; 0 for an isolated node.
    std::size_t active_degree(const NodeId& n) const;

    /// Classifies by active degree. Throws UnknownNodeError for foreign ids
    /// and Error for a node with no live links (the taxonomy has no value
    /// for a fully cut-off node).
    NodeKind classify(const NodeId& n) const;

    /// Derived graph with the suspects added to the isolated set. Idempotent.
    NetworkGraph isolate(const std::set<NodeId>& suspects) const;

    /// Suspects that are End nodes at the time of isolation. Isolating them
    /// is permitted but callers are expected to flag it.
    std::vector<NodeId> end_node_suspects(const std::set<NodeId>& suspects) const;

    /// Minimum-cost path between two non-isolated nodes, avoiding isolated
    /// nodes. Equal-cost ties break to the lexicographically smallest node
    /// sequence. Throws PartitionedError when unreachable or when either
    /// endpoint is isolated.
    Path shortest_path(const NodeId& src, const NodeId& dst) const;
    std::optional<Path> try_shortest_path(const NodeId& src, const NodeId& dst) const;

    bool reachable(const NodeId& src, const NodeId& dst) const;

private:
    static std::pair<NodeId, NodeId> key(const NodeId& a, const NodeId& b);

    std::vector<NodeId> nodes_;                          // sorted
    std::map<std::pair<NodeId, NodeId>, LinkSpec> links_; // key: ordered pair
    std::map<NodeId, std::vector<NodeId>> adjacency_;     // sorted neighbor lists
    std::set<NodeId> isolated_;
};

struct RerouteOutcome {
    enum class Kind { Unaffected, Rerouted, Shed };
    Kind kind;
    std::size_t delta = 0; // hop increase, 0 unless Rerouted
    std::optional<Path> new_path;
};

/// Reroute decision for one connection path when the suspects are isolated.
/// A path that avoids the suspects is untouched (delta 0); otherwise the
/// connection either reroutes on the isolated graph or is shed.
RerouteOutcome reroute_delta(const NetworkGraph& graph, const Path& current,
                             const std::set<NodeId>& suspects);

struct PartitionReport {
    struct PairStatus {
        NodeId a;
        NodeId b;
        bool reachable;
    };
    std::vector<PairStatus> pairs;
    /// True when the non-isolated nodes no longer form a single component.
    bool network_partitioned;
};

PartitionReport partition_check(const NetworkGraph& graph, const std::set<NodeId>& suspects,
                                const std::vector<std::pair<NodeId, NodeId>>& endpoint_pairs);

/// Exhaustive search for the smallest set of nodes the hijacker can frame
/// whose isolation brings the network down. Frameable nodes are the interior
/// nodes of configured connection paths that run through the hijacker
/// (the nodes it can implicate through the checks it is able to corrupt),
/// excluding the hijacker itself. A candidate set qualifies when, after its
/// isolation, no two distinct configured endpoints can reach each other.
/// Subsets are visited in (size, lexicographic) order, so the result is
/// deterministic. budget must be <= 12.
std::optional<std::vector<NodeId>> framing_cut_search(
    const NetworkGraph& graph, const NodeId& hijacker,
    const std::vector<std::pair<NodeId, NodeId>>& endpoint_pairs, int budget);

} // namespace qrsim
