#include "qrsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace qrsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slop for comparing sums of link costs along alternate paths.
constexpr double kCostTol = 1e-9;

bool close(double a, double b) {
    return std::abs(a - b) <= kCostTol * std::max({1.0, std::abs(a), std::abs(b)});
}
} // namespace

bool Path::contains(const NodeId& n) const {
    return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

std::vector<NodeId> Path::interior() const {
    if (nodes.size() <= 2) return {};
    return std::vector<NodeId>(nodes.begin() + 1, nodes.end() - 1);
}

std::pair<NodeId, NodeId> NetworkGraph::key(const NodeId& a, const NodeId& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

NetworkGraph NetworkGraph::build(std::vector<NodeId> nodes, const std::vector<LinkSpec>& links) {
    NetworkGraph g;
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
        throw ValidationError("duplicate node id in topology");
    }
    g.nodes_ = std::move(nodes);
    for (const LinkSpec& l : links) {
        if (l.a == l.b) throw ValidationError("self loop on node " + l.a);
        if (!g.has_node(l.a) || !g.has_node(l.b)) {
            throw ValidationError("link references unknown node: " + l.a + "-" + l.b);
        }
        if (!(l.cost > 0.0)) throw ValidationError("link cost must be positive: " + l.a + "-" + l.b);
        if (!(l.fidelity > 0.25 && l.fidelity <= 1.0)) {
            throw ValidationError("link fidelity must lie in (0.25, 1]: " + l.a + "-" + l.b);
        }
        auto k = key(l.a, l.b);
        if (!g.links_.emplace(k, l).second) {
            throw ValidationError("duplicate link " + l.a + "-" + l.b);
        }
        g.adjacency_[l.a].push_back(l.b);
        g.adjacency_[l.b].push_back(l.a);
    }
    for (auto& [n, adj] : g.adjacency_) std::sort(adj.begin(), adj.end());
    return g;
}

bool NetworkGraph::has_node(const NodeId& n) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), n);
}

bool NetworkGraph::has_link(const NodeId& a, const NodeId& b) const {
    return links_.count(key(a, b)) > 0;
}

double NetworkGraph::link_cost(const NodeId& a, const NodeId& b) const {
    auto it = links_.find(key(a, b));
    if (it == links_.end()) throw UnknownNodeError("no link " + a + "-" + b);
    return it->second.cost;
}

double NetworkGraph::link_fidelity(const NodeId& a, const NodeId& b) const {
    auto it = links_.find(key(a, b));
    if (it == links_.end()) throw UnknownNodeError("no link " + a + "-" + b);
    return it->second.fidelity;
}

std::vector<NodeId> NetworkGraph::active_neighbors(const NodeId& n) const {
    if (!has_node(n)) throw UnknownNodeError("unknown node " + n);
    std::vector<NodeId> out;
    if (is_isolated(n)) return out;
    auto it = adjacency_.find(n);
    if (it == adjacency_.end()) return out;
    for (const NodeId& m : it->second) {
        if (!is_isolated(m)) out.push_back(m);
    }
    return out;
}

std::size_t NetworkGraph::active_degree(const NodeId& n) const {
    return active_neighbors(n).size();
}

NodeKind NetworkGraph::classify(const NodeId& n) const {
    const std::size_t d = active_degree(n);
    if (d == 0) throw Error("node " + n + " has no live links; taxonomy undefined");
    if (d == 1) return NodeKind::EndNode;
    if (d == 2) return NodeKind::Repeater;
    return NodeKind::Router;
}

NetworkGraph NetworkGraph::isolate(const std::set<NodeId>& suspects) const {
    for (const NodeId& s : suspects) {
        if (!has_node(s)) throw UnknownNodeError("cannot isolate unknown node " + s);
    }
    NetworkGraph g = *this;
    g.isolated_.insert(suspects.begin(), suspects.end());
    return g;
}

std::vector<NodeId> NetworkGraph::end_node_suspects(const std::set<NodeId>& suspects) const {
    std::vector<NodeId> flagged;
    for (const NodeId& s : suspects) {
        if (has_node(s) && !is_isolated(s) && active_degree(s) == 1) flagged.push_back(s);
    }
    return flagged;
}

std::optional<Path> NetworkGraph::try_shortest_path(const NodeId& src, const NodeId& dst) const {
    if (!has_node(src) || !has_node(dst)) {
        throw UnknownNodeError("path endpoints must be known nodes");
    }
    if (is_isolated(src) || is_isolated(dst)) return std::nullopt;
    if (src == dst) return Path{{src}};

    // Dijkstra from a start node over live links.
    const auto dijkstra = [this](const NodeId& start) {
        std::map<NodeId, double> dist;
        for (const NodeId& n : nodes_) dist[n] = kInf;
        dist[start] = 0.0;
        using Entry = std::pair<double, NodeId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        heap.emplace(0.0, start);
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (const NodeId& v : active_neighbors(u)) {
                const double nd = d + link_cost(u, v);
                if (nd < dist[v]) {
                    dist[v] = nd;
                    heap.emplace(nd, v);
                }
            }
        }
        return dist;
    };

    const auto from_src = dijkstra(src);
    if (from_src.at(dst) == kInf) return std::nullopt;
    const auto to_dst = dijkstra(dst);
    const double total = from_src.at(dst);

    // Walk forward greedily: at each step take the smallest neighbor that
    // stays on some minimum-cost path. Costs are positive, so distance from
    // the source strictly increases and the walk terminates.
    Path path{{src}};
    NodeId u = src;
    while (u != dst) {
        bool advanced = false;
        for (const NodeId& v : active_neighbors(u)) {
            const double through = from_src.at(u) + link_cost(u, v);
            if (close(through, from_src.at(v)) && close(from_src.at(v) + to_dst.at(v), total)) {
                path.nodes.push_back(v);
                u = v;
                advanced = true;
                break;
            }
        }
        if (!advanced) return std::nullopt; // defensive; unreachable for consistent distances
    }
    return path;
}

Path NetworkGraph::shortest_path(const NodeId& src, const NodeId& dst) const {
    auto p = try_shortest_path(src, dst);
    if (!p) throw PartitionedError("no route from " + src + " to " + dst);
    return *p;
}

bool NetworkGraph::reachable(const NodeId& src, const NodeId& dst) const {
    return try_shortest_path(src, dst).has_value();
}

RerouteOutcome reroute_delta(const NetworkGraph& graph, const Path& current,
                             const std::set<NodeId>& suspects) {
    const bool affected = std::any_of(current.nodes.begin(), current.nodes.end(),
                                      [&](const NodeId& n) { return suspects.count(n) > 0; });
    if (!affected) return RerouteOutcome{RerouteOutcome::Kind::Unaffected, 0, std::nullopt};

    const NetworkGraph after = graph.isolate(suspects);
    auto next = after.try_shortest_path(current.nodes.front(), current.nodes.back());
    if (!next) return RerouteOutcome{RerouteOutcome::Kind::Shed, 0, std::nullopt};
    const std::size_t old_hops = current.hops();
    const std::size_t new_hops = next->hops();
    const std::size_t delta = new_hops > old_hops ? new_hops - old_hops : 0;
    return RerouteOutcome{RerouteOutcome::Kind::Rerouted, delta, std::move(next)};
}

PartitionReport partition_check(const NetworkGraph& graph, const std::set<NodeId>& suspects,
                                const std::vector<std::pair<NodeId, NodeId>>& endpoint_pairs) {
    const NetworkGraph after = graph.isolate(suspects);
    PartitionReport report;
    for (const auto& [a, b] : endpoint_pairs) {
        const bool ok = !after.is_isolated(a) && !after.is_isolated(b) && after.reachable(a, b);
        report.pairs.push_back({a, b, ok});
    }
    // Component count over the live subgraph.
    std::set<NodeId> seen;
    std::size_t components = 0;
    for (const NodeId& n : after.nodes()) {
        if (after.is_isolated(n) || seen.count(n)) continue;
        ++components;
        std::vector<NodeId> stack{n};
        seen.insert(n);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (const NodeId& v : after.active_neighbors(u)) {
                if (seen.insert(v).second) stack.push_back(v);
            }
        }
    }
    report.network_partitioned = components > 1;
    return report;
}

std::optional<std::vector<NodeId>> framing_cut_search(
    const NetworkGraph& graph, const NodeId& hijacker,
    const std::vector<std::pair<NodeId, NodeId>>& endpoint_pairs, int budget) {
    if (!graph.has_node(hijacker)) throw UnknownNodeError("unknown hijacker node " + hijacker);
    if (budget > 12) throw ValidationError("framing cut search budget is capped at 12");
    if (budget <= 0) return std::nullopt;

    // Frameable: interior nodes of configured paths through the hijacker.
    std::set<NodeId> frameable;
    std::set<NodeId> endpoints;
    for (const auto& [a, b] : endpoint_pairs) {
        endpoints.insert(a);
        endpoints.insert(b);
        auto p = graph.try_shortest_path(a, b);
        if (!p || !p->contains(hijacker)) continue;
        for (const NodeId& n : p->interior()) {
            if (n != hijacker) frameable.insert(n);
        }
    }
    if (frameable.empty()) return std::nullopt;

    const std::vector<NodeId> pool(frameable.begin(), frameable.end()); // sorted
    std::vector<NodeId> ends(endpoints.begin(), endpoints.end());

    const auto severed = [&](const std::set<NodeId>& cut) {
        const NetworkGraph after = graph.isolate(cut);
        for (std::size_t i = 0; i < ends.size(); ++i) {
            for (std::size_t j = i + 1; j < ends.size(); ++j) {
                if (after.is_isolated(ends[i]) || after.is_isolated(ends[j])) continue;
                if (after.reachable(ends[i], ends[j])) return false;
            }
        }
        return true;
    };

    // Subsets in (size, lexicographic) order.
    const int max_size = std::min<int>(budget, static_cast<int>(pool.size()));
    std::vector<std::size_t> pick;
    const std::function<std::optional<std::vector<NodeId>>(std::size_t, std::size_t)> search =
        [&](std::size_t want, std::size_t from) -> std::optional<std::vector<NodeId>> {
        if (pick.size() == want) {
            std::set<NodeId> cut;
            for (std::size_t idx : pick) cut.insert(pool[idx]);
            if (severed(cut)) return std::vector<NodeId>(cut.begin(), cut.end());
            return std::nullopt;
        }
        for (std::size_t i = from; i < pool.size(); ++i) {
            pick.push_back(i);
            if (auto hit = search(want, i + 1)) return hit;
            pick.pop_back();
        }
        return std::nullopt;
    };
    for (int size = 1; size <= max_size; ++size) {
        if (auto hit = search(static_cast<std::size_t>(size), 0)) return hit;
    }
    return std::nullopt;
}

} // namespace qrsim
