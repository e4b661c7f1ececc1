#include "qrsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "qrsim/detection.hpp"
#include "qrsim/rng.hpp"

namespace qrsim {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

BellCoeffs mix_states(const BellCoeffs& base, double alpha) {
    const BellCoeffs bad = hijacked_state();
    return BellCoeffs((1.0 - alpha) * base.phi_plus() + alpha * bad.phi_plus(),
                      (1.0 - alpha) * base.psi_plus() + alpha * bad.psi_plus(),
                      (1.0 - alpha) * base.psi_minus() + alpha * bad.psi_minus(),
                      (1.0 - alpha) * base.phi_minus() + alpha * bad.phi_minus());
}

double min_path_fidelity(const NetworkGraph& graph, const Path& path) {
    double f = 1.0;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        f = std::min(f, graph.link_fidelity(path.nodes[i], path.nodes[i + 1]));
    }
    return f;
}

/// Per-segment verdicts for a hijacker that corrupts every pair it touches
/// within one connection: a segment fails exactly when it spans the
/// hijacker's position.
std::vector<CheckResult> truthful_results(const SwapTree& tree, std::size_t culprit_pos) {
    std::vector<CheckResult> results;
    for (const auto& node : tree.tree()) {
        const bool fails = node.seg.i <= culprit_pos && culprit_pos <= node.seg.j;
        results.push_back(CheckResult{node.seg, node.level,
                                      fails ? Verdict::Fail : Verdict::Pass, 0});
    }
    return results;
}

struct Monitor {
    std::string name;
    BellCoeffs base;
    std::int64_t window_bursts;
    double interval;
    std::int64_t burst_pairs;
};

struct AdmittedState {
    NetworkGraph graph;
    std::vector<Connection> connections;
    double work = 0.0;
    double maintenance = 0.0;
    double bootstrap_end = 0.0;
};

void validate(const ScenarioConfig& s) {
    if (!(s.capacity > 0.0)) throw ValidationError("capacity must be positive");
    if (!(s.duration > 0.0)) throw ValidationError("run duration must be positive");
    if (!(s.time_step > 0.0)) throw ValidationError("time step must be positive");
    if (s.window.bursts <= 0 || s.window.conn_bursts <= 0 || s.window.burst_pairs <= 0) {
        throw ValidationError("window sizes and burst size must be positive");
    }
    if (!(s.window.mean_interval > 0.0) || !(s.window.conn_mean_interval > 0.0)) {
        throw ValidationError("burst intervals must be positive");
    }
    if (s.window.jitter < 0.0 || s.window.jitter >= 1.0) {
        throw ValidationError("jitter fraction must lie in [0, 1)");
    }
    std::set<std::string> ids;
    for (const ConnectionSpec& c : s.connections) {
        if (!ids.insert(c.id).second) throw ValidationError("duplicate connection id " + c.id);
        if (!(c.rate > 0.0)) throw ValidationError("connection rate must be positive: " + c.id);
        if (const auto* es = std::get_if<EsModel>(&c.model)) {
            if (!(es->path_exponent >= 1.0)) {
                throw ValidationError("ES path exponent must be >= 1: " + c.id);
            }
        } else if (std::get<QecModel>(c.model).code_distance < 1) {
            throw ValidationError("QEC code distance must be >= 1: " + c.id);
        }
        if (c.reroute_rate && !(*c.reroute_rate > 0.0)) {
            throw ValidationError("post-reroute rate must be positive: " + c.id);
        }
    }
    if (s.hijacker) {
        const auto& h = *s.hijacker;
        if (!(h.start_time >= 0.0 && h.start_time < s.duration)) {
            throw ValidationError("hijack start time must fall inside the run");
        }
        if (const auto* f = std::get_if<Frame>(&h.strategy)) {
            if (f->victim == h.node) throw ValidationError("a hijacker cannot frame itself");
            if (!(f->blind_rate > 0.0 && f->blind_rate <= 1.0)) {
                throw ValidationError("blind corruption rate must lie in (0, 1]");
            }
        }
        for (const auto& iv : h.active_intervals) {
            if (!(iv.first < iv.second)) {
                throw ValidationError("active intervals must satisfy begin < end");
            }
        }
    }
}

AdmittedState admit(const ScenarioConfig& s, std::vector<SimEvent>& events) {
    AdmittedState state;
    state.graph = NetworkGraph::build(s.nodes, s.links);

    for (const ConnectionSpec& spec : s.connections) {
        if (!state.graph.has_node(spec.from) || !state.graph.has_node(spec.to)) {
            throw ValidationError("connection " + spec.id + " references unknown nodes");
        }
        auto path = state.graph.try_shortest_path(spec.from, spec.to);
        if (!path) {
            events.push_back(SimEvent{0.0, "connection_rejected",
                                      spec.id + ": endpoints unreachable at admission"});
            continue;
        }
        state.connections.push_back(Connection{spec.id, spec.from, spec.to, std::move(*path),
                                               spec.rate, spec.model, spec.priority,
                                               spec.reroute_rate});
    }

    double link_cost_sum = 0.0;
    for (const auto& [key, link] : state.graph.links()) {
        const double m = link_check_cost(link.fidelity, s.cost_model, s.accounting);
        link_cost_sum += m;
        const double needed = tomography_sample_count(link.fidelity, s.cost_model);
        if (static_cast<double>(s.window.bursts * s.window.burst_pairs) < needed) {
            throw ValidationError("one window must carry at least B(F) checked pairs for link " +
                                  key.first + "-" + key.second);
        }
    }
    state.work = network_work(state.connections);
    state.maintenance =
        maintenance_rate(state.graph, state.connections, s.window, s.cost_model, s.accounting);
    state.bootstrap_end = link_cost_sum / s.capacity;
    return state;
}

void validate_hijacker(const ScenarioConfig& s, const AdmittedState& state) {
    if (!s.hijacker) return;
    const auto& h = *s.hijacker;
    const NodeKind kind = state.graph.classify(h.node); // throws for unknown node
    if (kind == NodeKind::EndNode) {
        throw ValidationError("hijacker must be a Router or Repeater, not an End node");
    }
    if (const auto* t = std::get_if<TargetConnection>(&h.strategy)) {
        const auto it = std::find_if(state.connections.begin(), state.connections.end(),
                                     [&](const Connection& c) { return c.id == t->connection_id; });
        if (it == state.connections.end()) {
            throw ValidationError("target connection " + t->connection_id + " was not admitted");
        }
        if (!it->path.contains(h.node)) {
            throw ValidationError("target connection does not pass through the hijacker");
        }
    }
    double min_f = 1.0;
    for (const auto& [key, link] : state.graph.links()) min_f = std::min(min_f, link.fidelity);
    if (chsh(two_round_pipeline(min_f).twice) <= 2.0) {
        throw ValidationError("link fidelity too low: twice-purified pairs cannot certify a "
                              "CHSH violation, so checks cannot distinguish hijacking");
    }
}

/// The connection whose check chain a Frame strategy can aim at, plus the
/// qualifying leaf. Chain levels must implicate the victim without the
/// hijacker.
struct FramedChain {
    const Connection* connection = nullptr;
    std::vector<SwapTree::ChainLevel> chain;
    std::vector<std::size_t> victim_levels;
};

std::optional<FramedChain> find_framed_chain(const std::vector<Connection>& connections,
                                             const NodeId& hijacker, const NodeId& victim) {
    for (const Connection& c : connections) {
        if (!c.path.contains(hijacker) || !std::holds_alternative<EsModel>(c.model)) continue;
        const SwapTree tree(c.path);
        for (std::size_t leaf = 0; leaf + 1 < c.path.nodes.size(); ++leaf) {
            if (c.path.nodes[leaf] != hijacker && c.path.nodes[leaf + 1] != hijacker) continue;
            auto chain = tree.check_chain(leaf);
            std::vector<std::size_t> victim_levels;
            for (std::size_t l = 0; l < chain.size(); ++l) {
                const auto& nodes = chain[l].implicated;
                const bool hits_victim =
                    std::find(nodes.begin(), nodes.end(), victim) != nodes.end();
                const bool hits_self =
                    std::find(nodes.begin(), nodes.end(), hijacker) != nodes.end();
                if (hits_victim && !hits_self) victim_levels.push_back(l);
            }
            if (!victim_levels.empty()) {
                return FramedChain{&c, std::move(chain), std::move(victim_levels)};
            }
        }
    }
    return std::nullopt;
}

std::vector<Monitor> build_monitors(const ScenarioConfig& s, const AdmittedState& state) {
    std::vector<Monitor> monitors;
    if (!s.hijacker) return monitors;
    const auto& h = *s.hijacker;
    const auto twice_purified = [&](double f) { return two_round_pipeline(f).twice; };

    if (std::holds_alternative<CorruptAll>(h.strategy)) {
        for (const auto& [key, link] : state.graph.links()) {
            if (key.first != h.node && key.second != h.node) continue;
            monitors.push_back(Monitor{"link:" + key.first + "-" + key.second,
                                       twice_purified(link.fidelity), s.window.bursts,
                                       s.window.mean_interval, s.window.burst_pairs});
        }
    } else if (const auto* t = std::get_if<TargetConnection>(&h.strategy)) {
        const auto it = std::find_if(state.connections.begin(), state.connections.end(),
                                     [&](const Connection& c) { return c.id == t->connection_id; });
        monitors.push_back(Monitor{"conn:" + it->id,
                                   twice_purified(min_path_fidelity(state.graph, it->path)),
                                   s.window.conn_bursts, s.window.conn_mean_interval,
                                   s.window.burst_pairs});
    } else {
        const auto& frame = std::get<Frame>(h.strategy);
        auto framed = find_framed_chain(state.connections, h.node, frame.victim);
        if (!framed) {
            throw ValidationError("frame victim " + frame.victim +
                                  " shares no check level with the hijacker");
        }
        monitors.push_back(
            Monitor{"conn:" + framed->connection->id + ":framed-check",
                    twice_purified(min_path_fidelity(state.graph, framed->connection->path)),
                    s.window.conn_bursts, s.window.conn_mean_interval, s.window.burst_pairs});
    }
    return monitors;
}

struct Detection {
    double time = 0.0;
    std::string monitor;
};

std::optional<Detection> detect(const ScenarioConfig& s, const AdmittedState& state,
                                const std::vector<Monitor>& monitors, std::uint64_t seed) {
    if (!s.hijacker) return std::nullopt;
    std::optional<Detection> best;
    for (const Monitor& mon : monitors) {
        const double span = s.duration - state.bootstrap_end;
        if (span <= 0.0) continue;
        const std::size_t count =
            static_cast<std::size_t>(std::ceil(span / mon.interval)) + 1;
        const std::uint64_t stream_seed = fnv1a(mon.name, seed);
        const std::vector<double> times =
            burst_times(count, state.bootstrap_end, mon.interval, s.window.jitter, stream_seed);
        const std::size_t w = static_cast<std::size_t>(mon.window_bursts);
        std::vector<bool> corrupted;
        corrupted.reserve(times.size());
        std::size_t in_window = 0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double t = times[k];
            if (t > s.duration) break;
            corrupted.push_back(hijacker_active(*s.hijacker, t));
            in_window += corrupted.back() ? 1 : 0;
            if (corrupted.size() > w) {
                in_window -= corrupted[corrupted.size() - 1 - w] ? 1 : 0;
            }
            if (corrupted.size() < w || in_window == 0) continue;
            const double alpha = static_cast<double>(in_window) / static_cast<double>(w);
            const long trials = static_cast<long>(mon.window_bursts * mon.burst_pairs);
            const std::uint64_t verdict_seed = fnv1a(mon.name + ":" + std::to_string(k), seed);
            if (statistical_verdict(mix_states(mon.base, alpha), trials, verdict_seed) ==
                Verdict::Fail) {
                if (!best || t < best->time) best = Detection{t, mon.name};
                break;
            }
        }
    }
    return best;
}

std::vector<NodeId> identify_suspects(const ScenarioConfig& s, const AdmittedState& state) {
    const auto& h = *s.hijacker;
    std::set<NodeId> suspects;

    if (std::holds_alternative<CorruptAll>(h.strategy)) {
        bool any_connection = false;
        std::vector<EndToEndCheck> qec_checks;
        for (const Connection& c : state.connections) {
            const bool through = c.path.contains(h.node);
            if (std::holds_alternative<QecModel>(c.model)) {
                qec_checks.push_back(
                    EndToEndCheck{c.path, through ? Verdict::Fail : Verdict::Pass});
                any_connection = any_connection || through;
                continue;
            }
            if (!through) continue;
            any_connection = true;
            const SwapTree tree(c.path);
            const auto pos = std::find(c.path.nodes.begin(), c.path.nodes.end(), h.node) -
                             c.path.nodes.begin();
            const SuspectReport report =
                identify_es(tree, truthful_results(tree, static_cast<std::size_t>(pos)));
            suspects.insert(report.candidates.begin(), report.candidates.end());
        }
        if (std::any_of(qec_checks.begin(), qec_checks.end(),
                        [](const EndToEndCheck& c) { return c.verdict == Verdict::Fail; })) {
            const SuspectReport report = identify_qec(qec_checks);
            suspects.insert(report.candidates.begin(), report.candidates.end());
        }
        if (!any_connection) {
            // Only link checks fail; every failing link is incident to the
            // hijacker, so the endpoint sets intersect to the hijacker alone.
            suspects.insert(h.node);
        }
    } else if (const auto* t = std::get_if<TargetConnection>(&h.strategy)) {
        const auto it = std::find_if(state.connections.begin(), state.connections.end(),
                                     [&](const Connection& c) { return c.id == t->connection_id; });
        if (std::holds_alternative<EsModel>(it->model)) {
            const SwapTree tree(it->path);
            const auto pos = std::find(it->path.nodes.begin(), it->path.nodes.end(), h.node) -
                             it->path.nodes.begin();
            const SuspectReport report =
                identify_es(tree, truthful_results(tree, static_cast<std::size_t>(pos)));
            suspects.insert(report.candidates.begin(), report.candidates.end());
        } else {
            std::vector<EndToEndCheck> checks;
            for (const Connection& c : state.connections) {
                if (!std::holds_alternative<QecModel>(c.model)) continue;
                checks.push_back(
                    EndToEndCheck{c.path, c.id == it->id ? Verdict::Fail : Verdict::Pass});
            }
            const SuspectReport report = identify_qec(checks);
            suspects.insert(report.candidates.begin(), report.candidates.end());
        }
    } else {
        const auto& frame = std::get<Frame>(h.strategy);
        const auto framed = find_framed_chain(state.connections, h.node, frame.victim);
        const SwapTree tree(framed->connection->path);
        const bool targetable =
            h.knowledge == Knowledge::KnowsSchedule ||
            std::holds_alternative<PredictableMode>(s.schedule);
        // Verdicts are modeled as reliable: a check fails when the corrupted
        // mixture it measures no longer violates CHSH.
        std::set<Segment> failing;
        if (targetable) {
            for (std::size_t l : framed->victim_levels) failing.insert(framed->chain[l].seg);
        } else {
            const double min_f = min_path_fidelity(state.graph, framed->connection->path);
            const BellCoeffs base = two_round_pipeline(min_f).twice;
            if (chsh(mix_states(base, frame.blind_rate)) < 2.0) {
                for (const auto& lvl : framed->chain) failing.insert(lvl.seg);
            }
        }
        std::vector<CheckResult> results;
        for (const auto& node : tree.tree()) {
            results.push_back(CheckResult{node.seg, node.level,
                                          failing.count(node.seg) ? Verdict::Fail : Verdict::Pass,
                                          0});
        }
        const SuspectReport report = identify_es(tree, results);
        suspects.insert(report.candidates.begin(), report.candidates.end());
    }
    return std::vector<NodeId>(suspects.begin(), suspects.end());
}

struct PhaseState {
    double work = 0.0;          // effective W after shedding
    double work_before_shed = 0.0;
    double shed_work = 0.0;
    double slack_value = 0.0;
    std::vector<std::string> shed_ids;
};

PhaseState settle_phase(const std::vector<Connection>& connections,
                        const std::vector<RerouteOutcome>& outcomes, double base_work,
                        const std::set<NodeId>& isolated_set, double effective_capacity,
                        double effective_maintenance, double t, const char* shed_kind,
                        std::vector<SimEvent>& events) {
    PhaseState phase;
    phase.work_before_shed = rerouted_work(base_work, isolated_set, connections, outcomes);

    std::vector<std::string> ids;
    std::vector<int> priorities;
    std::vector<double> contributions;
    for (std::size_t i = 0; i < connections.size(); ++i) {
        const Connection& c = connections[i];
        double contrib = 0.0;
        if (outcomes[i].kind == RerouteOutcome::Kind::Unaffected) {
            contrib = static_cast<double>(c.path.hops() + 1) * hop_overhead(c) * c.rate;
        } else if (outcomes[i].kind == RerouteOutcome::Kind::Rerouted) {
            Connection moved = c;
            moved.path = *outcomes[i].new_path;
            moved.rate = c.reroute_rate.value_or(c.rate);
            contrib = static_cast<double>(moved.path.hops() + 1) * hop_overhead(moved) * moved.rate;
        } else {
            continue;
        }
        ids.push_back(c.id);
        priorities.push_back(c.priority);
        contributions.push_back(contrib);
    }

    phase.work = phase.work_before_shed;
    const double deficit = -(effective_capacity - phase.work - effective_maintenance);
    for (std::size_t idx : shedding_policy(ids, priorities, contributions, deficit)) {
        phase.work -= contributions[idx];
        phase.shed_work += contributions[idx];
        phase.shed_ids.push_back(ids[idx]);
        events.push_back(SimEvent{t, shed_kind, ids[idx] + " dropped to recover slack"});
    }
    phase.slack_value = effective_capacity - phase.work - effective_maintenance;
    return phase;
}

} // namespace

std::vector<std::size_t> shedding_policy(const std::vector<std::string>& ids,
                                         const std::vector<int>& priorities,
                                         const std::vector<double>& work_contribution,
                                         double deficit) {
    if (ids.size() != priorities.size() || ids.size() != work_contribution.size()) {
        throw std::invalid_argument("shedding inputs must have matching lengths");
    }
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (priorities[a] != priorities[b]) return priorities[a] < priorities[b];
        if (work_contribution[a] != work_contribution[b]) {
            return work_contribution[a] > work_contribution[b];
        }
        return ids[a] < ids[b];
    });
    std::vector<std::size_t> shed;
    double recovered = 0.0;
    for (std::size_t idx : order) {
        if (deficit - recovered < 0.0) break; // slack is strictly positive again
        shed.push_back(idx);
        recovered += work_contribution[idx];
    }
    return shed;
}

SimulationTimeline run(const ScenarioConfig& scenario, std::uint64_t seed) {
    validate(scenario);

    SimulationTimeline timeline;
    timeline.seed = seed;

    AdmittedState state = admit(scenario, timeline.events);
    validate_hijacker(scenario, state);

    const double capacity = scenario.capacity;
    const double work = state.work;
    const double maintenance = state.maintenance;
    timeline.summary.bootstrap_end = state.bootstrap_end;
    timeline.summary.phase2_work = work;
    timeline.summary.phase2_maintenance = maintenance;
    timeline.summary.phase2_slack = slack(capacity, work, maintenance);

    if (scenario.hijacker) {
        timeline.summary.hijack_time = scenario.hijacker->start_time;
        timeline.events.push_back(SimEvent{scenario.hijacker->start_time, "hijack_start",
                                           "node " + scenario.hijacker->node});
    }

    const std::vector<Monitor> monitors = build_monitors(scenario, state);
    const std::optional<Detection> detection = detect(scenario, state, monitors, seed);

    std::optional<double> detect_t;
    std::optional<double> reinstate_t;
    PhaseState phase3;
    PhaseState phase4;
    std::set<NodeId> suspects_set;
    double capacity_sus = 0.0, maintenance_sus = 0.0;
    double capacity_k = 0.0, maintenance_k = 0.0;
    double loss_sus = 0.0, loss_k = 0.0;

    if (detection) {
        detect_t = detection->time;
        timeline.summary.detection_time = detect_t;
        timeline.summary.detection_lag = *detect_t - scenario.hijacker->start_time;
        timeline.events.push_back(
            SimEvent{*detect_t, "detection", "failed window on " + detection->monitor});

        const std::vector<NodeId> suspects = identify_suspects(scenario, state);
        timeline.summary.suspects = suspects;
        suspects_set.insert(suspects.begin(), suspects.end());

        std::string isolation_note = join(suspects);
        const auto flagged = state.graph.end_node_suspects(suspects_set);
        if (!flagged.empty()) {
            isolation_note += " (end nodes flagged: " + join(flagged) + ")";
        }
        timeline.events.push_back(SimEvent{*detect_t, "isolation", isolation_note});

        std::vector<RerouteOutcome> outcomes;
        for (const Connection& c : state.connections) {
            outcomes.push_back(reroute_delta(state.graph, c.path, suspects_set));
            const RerouteOutcome& out = outcomes.back();
            if (out.kind == RerouteOutcome::Kind::Rerouted) {
                timeline.events.push_back(SimEvent{
                    *detect_t, "reroute",
                    c.id + ": +" + std::to_string(out.delta) + " hops"});
            } else if (out.kind == RerouteOutcome::Kind::Shed) {
                timeline.events.push_back(
                    SimEvent{*detect_t, "reroute", c.id + ": no route, connection shed"});
            }
        }

        const double fraction =
            static_cast<double>(suspects_set.size()) / static_cast<double>(state.graph.nodes().size());
        capacity_sus = scenario.overrides.capacity_sus.value_or(capacity * fraction);
        maintenance_sus = scenario.overrides.maintenance_sus.value_or(maintenance * fraction);
        loss_sus = work_loss(suspects_set, state.connections, 1.0);

        phase3 = settle_phase(state.connections, outcomes, work, suspects_set,
                              capacity - capacity_sus, maintenance - maintenance_sus, *detect_t,
                              "shed", timeline.events);
        timeline.summary.work_prime = phase3.work_before_shed;
        timeline.summary.reroute_budget = phase3.work_before_shed - work;
        timeline.summary.reroute_budget_limit =
            (capacity - capacity_sus) - (maintenance - maintenance_sus) - work;
        timeline.summary.slack_prime_final = phase3.slack_value;
        timeline.summary.shed_connections = phase3.shed_ids;

        const double t_rein = *detect_t + scenario.verification_delay;
        if (t_rein <= scenario.duration) {
            reinstate_t = t_rein;
            const NodeId& culprit = scenario.hijacker->node;
            std::vector<NodeId> reinstated;
            for (const NodeId& n : suspects_set) {
                if (n != culprit) reinstated.push_back(n);
            }
            timeline.summary.reinstated = reinstated;
            timeline.events.push_back(SimEvent{
                t_rein, "reinstatement",
                reinstated.empty() ? "no innocents were isolated"
                                   : join(reinstated) + " returned; " + culprit + " confirmed"});

            const std::set<NodeId> culprit_only{culprit};
            std::vector<RerouteOutcome> outcomes4;
            for (const Connection& c : state.connections) {
                outcomes4.push_back(reroute_delta(state.graph, c.path, culprit_only));
            }
            const double fraction_k = 1.0 / static_cast<double>(state.graph.nodes().size());
            capacity_k = scenario.overrides.capacity_k.value_or(capacity * fraction_k);
            maintenance_k = scenario.overrides.maintenance_k.value_or(maintenance * fraction_k);
            loss_k = work_loss(culprit_only, state.connections, 1.0);
            phase4 = settle_phase(state.connections, outcomes4, work, culprit_only,
                                  capacity - capacity_k, maintenance - maintenance_k, t_rein,
                                  "shed", timeline.events);
            timeline.summary.work_second = phase4.work_before_shed;
            timeline.summary.slack_second_final = phase4.slack_value;
        }
    }

    std::sort(timeline.events.begin(), timeline.events.end(),
              [](const SimEvent& a, const SimEvent& b) {
                  return a.t != b.t ? a.t < b.t : a.kind < b.kind;
              });

    for (double t = 0.0; t <= scenario.duration + scenario.time_step * 1e-9;
         t += scenario.time_step) {
        TimelineRecord rec;
        rec.t = t;
        if (t < state.bootstrap_end && t < scenario.duration) {
            rec.phase = 1;
            rec.work = 0.0;
            rec.maintenance = capacity; // the whole capacity runs bootstrap tomography
            rec.slack = 0.0;
        } else if (!detect_t || t < *detect_t) {
            rec.phase = 2;
            rec.work = work;
            rec.maintenance = maintenance;
            rec.slack = slack(capacity, work, maintenance);
        } else if (!reinstate_t || t < *reinstate_t) {
            rec.phase = 3;
            rec.work = phase3.work;
            rec.maintenance = maintenance - maintenance_sus;
            rec.loss = loss_sus;
            rec.slack = slack_prime(capacity, capacity_sus, phase3.work, maintenance,
                                    maintenance_sus);
            rec.shed_work = phase3.shed_work;
            rec.isolated = suspects_set.size();
        } else {
            rec.phase = 4;
            rec.work = phase4.work;
            rec.maintenance = maintenance - maintenance_k;
            rec.loss = loss_k;
            rec.slack = slack_second(capacity, capacity_k, phase4.work, maintenance,
                                     maintenance_k);
            rec.shed_work = phase4.shed_work;
            rec.isolated = 1;
        }
        timeline.records.push_back(rec);
    }
    return timeline;
}

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}
} // namespace

std::string timeline_csv(const SimulationTimeline& timeline) {
    std::string out =
        "t_seconds,phase,work_pairs_per_s,maintenance_pairs_per_s,loss_pairs_per_s,"
        "slack_pairs_per_s,shed_work_pairs_per_s,isolated_nodes\n";
    for (const TimelineRecord& r : timeline.records) {
        out += fmt(r.t) + "," + std::to_string(r.phase) + "," + fmt(r.work) + "," +
               fmt(r.maintenance) + "," + fmt(r.loss) + "," + fmt(r.slack) + "," +
               fmt(r.shed_work) + "," + std::to_string(r.isolated) + "\n";
    }
    return out;
}

nlohmann::json events_json(const SimulationTimeline& timeline) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SimEvent& e : timeline.events) {
        rows.push_back({{"t_seconds", e.t}, {"kind", e.kind}, {"detail", e.detail}});
    }
    return nlohmann::json{{"seed", timeline.seed},
                          {"scenario_hash", timeline.scenario_hash},
                          {"events", rows}};
}

nlohmann::json summary_json(const SimulationTimeline& timeline) {
    const RunSummary& s = timeline.summary;
    nlohmann::json doc{{"seed", timeline.seed},
                       {"scenario_hash", timeline.scenario_hash},
                       {"bootstrap_end_s", s.bootstrap_end},
                       {"phase2", {{"work_pairs_per_s", s.phase2_work},
                                   {"maintenance_pairs_per_s", s.phase2_maintenance},
                                   {"slack_pairs_per_s", s.phase2_slack}}}};
    const auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) doc[key] = *v;
    };
    put("hijack_time_s", s.hijack_time);
    put("detection_time_s", s.detection_time);
    put("detection_lag_s", s.detection_lag);
    if (!s.suspects.empty() || s.detection_time) doc["suspects"] = s.suspects;
    put("work_prime_pairs_per_s", s.work_prime);
    put("reroute_budget_pairs_per_s", s.reroute_budget);
    put("reroute_budget_limit_pairs_per_s", s.reroute_budget_limit);
    put("slack_prime_pairs_per_s", s.slack_prime_final);
    if (s.work_prime) doc["shed_connections"] = s.shed_connections;
    if (s.work_second) doc["reinstated"] = s.reinstated;
    put("work_second_pairs_per_s", s.work_second);
    put("slack_second_pairs_per_s", s.slack_second_final);
    return doc;
}

} // namespace qrsim
