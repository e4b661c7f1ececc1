// Scenario fixtures shared between the engine tests and the acceptance
// suite. The worked-numbers scenarios are calibrated so W = 0.7C and
// R = 0.1C hold exactly in floating point.
#pragma once

#include "qrsim/engine.hpp"

namespace fixtures {

using namespace qrsim;

/// No hijacker: phases 1 and 2 only.
inline ScenarioConfig null_scenario() {
    ScenarioConfig s;
    s.nodes = {"a", "b", "c"};
    s.links = {{"a", "b", 1.0, 0.9}, {"b", "c", 1.0, 0.9}};
    ConnectionSpec c1;
    c1.id = "c1";
    c1.from = "a";
    c1.to = "c";
    c1.rate = 1.0;
    c1.model = EsModel{1.0};
    s.connections = {c1};
    s.capacity = 200.0;
    s.window.bursts = 200;
    s.window.mean_interval = 1.0;
    s.window.burst_pairs = 10;
    s.window.conn_bursts = 100000000;
    s.window.conn_mean_interval = 1.0;
    s.window.jitter = 0.25;
    s.cost_model = ConstantCost{2000.0};
    s.duration = 300.0;
    s.time_step = 1.0;
    return s;
}

/// Worked numbers, no shedding: C = 100, W = 70, R = 10 exactly; isolating
/// the hijacked repeater c reroutes the single connection over the detour
/// b-x-d with no extra hops, so W' = W and the slack stays positive.
inline ScenarioConfig worked_scenario() {
    ScenarioConfig s;
    s.nodes = {"a", "b", "c", "d", "e", "x"};
    s.links = {{"a", "b", 1.0, 1.0}, {"b", "c", 1.0, 1.0}, {"c", "d", 1.0, 1.0},
               {"d", "e", 1.0, 1.0}, {"b", "x", 1.0, 1.0}, {"x", "d", 1.0, 1.0}};
    ConnectionSpec c1;
    c1.id = "c1";
    c1.from = "a";
    c1.to = "e";
    c1.rate = 3.5; // W = 5 nodes * 4 hops * 3.5 = 70
    c1.model = EsModel{1.0};
    s.connections = {c1};
    s.capacity = 100.0;
    // Six links at M = 10^4: R_link = 6e4 / (200 * 50) = 6.
    // One ES connection at M = 10^12: R_conn = 1e12 / (5e9 * 50) = 4.
    s.window.bursts = 200;
    s.window.mean_interval = 50.0;
    s.window.burst_pairs = 13;
    s.window.conn_bursts = 5000000000LL;
    s.window.conn_mean_interval = 50.0;
    s.window.jitter = 0.0;
    s.cost_model = ConstantCost{2500.0};
    HijackerSpec h;
    h.node = "c";
    h.strategy = CorruptAll{};
    h.start_time = 700.0;
    s.hijacker = h;
    s.verification_delay = 400.0;
    s.duration = 11500.0;
    s.time_step = 1.0;
    s.overrides.capacity_sus = 10.0;    // 0.1 C
    s.overrides.maintenance_sus = 1.0;  // 0.1 R
    s.overrides.capacity_k = 10.0;
    s.overrides.maintenance_k = 1.0;
    return s;
}

/// Worked numbers, shedding: the only detour around c is one hop longer, so
/// W' = 105 >= 81 and the connection must be shed.
inline ScenarioConfig worked_shedding_scenario() {
    ScenarioConfig s = worked_scenario();
    s.nodes = {"a", "b", "c", "d", "e", "x1", "x2"};
    s.links = {{"a", "b", 1.0, 1.0},  {"b", "c", 1.0, 1.0},  {"c", "d", 1.0, 1.0},
               {"d", "e", 1.0, 1.0},  {"b", "x1", 1.0, 1.0}, {"x1", "x2", 1.0, 1.0},
               {"x2", "d", 1.0, 1.0}};
    // Seven links: R_link = 7e4 / (280 * 50) = 5; R_conn = 1e12 / (4e9 * 50) = 5.
    s.window.bursts = 280;
    s.window.burst_pairs = 9;
    s.window.conn_bursts = 4000000000LL;
    s.hijacker->start_time = 800.0;
    s.duration = 15500.0;
    return s;
}

/// Detection-lag scenario: w = 200 bursts of 10 pairs at m = 1 s against a
/// B = 2000 cost model, matching the 200-second verification window.
inline ScenarioConfig detection_lag_scenario() {
    ScenarioConfig s;
    s.nodes = {"a", "b", "c", "d"};
    s.links = {{"a", "b", 1.0, 0.9}, {"b", "c", 1.0, 0.9}, {"c", "d", 1.0, 0.9}};
    ConnectionSpec c1;
    c1.id = "c1";
    c1.from = "a";
    c1.to = "d";
    c1.rate = 1.0;
    c1.model = EsModel{1.0};
    s.connections = {c1};
    s.capacity = 1000.0;
    s.window.bursts = 200;
    s.window.mean_interval = 1.0;
    s.window.burst_pairs = 10;
    s.window.conn_bursts = 1000000000000LL;
    s.window.conn_mean_interval = 1.0;
    s.window.jitter = 0.0;
    s.cost_model = ConstantCost{2000.0};
    HijackerSpec h;
    h.node = "b";
    h.strategy = CorruptAll{};
    h.start_time = 300.0;
    s.hijacker = h;
    s.verification_delay = 50.0;
    s.duration = 600.0;
    s.time_step = 1.0;
    return s;
}

/// Framing scenario on the a-H-b-c walkthrough path.
inline ScenarioConfig frame_scenario(bool secure_schedule) {
    ScenarioConfig s;
    s.nodes = {"a", "H", "b", "c"};
    s.links = {{"a", "H", 1.0, 0.9}, {"H", "b", 1.0, 0.9}, {"b", "c", 1.0, 0.9}};
    ConnectionSpec c1;
    c1.id = "c1";
    c1.from = "a";
    c1.to = "c";
    c1.rate = 1.0;
    c1.model = EsModel{1.0};
    s.connections = {c1};
    s.capacity = 1000.0;
    s.window.bursts = 200;
    s.window.mean_interval = 1.0;
    s.window.burst_pairs = 10;
    s.window.conn_bursts = 250;
    s.window.conn_mean_interval = 1.0;
    s.window.jitter = 0.0;
    s.cost_model = ConstantCost{2000.0};
    if (secure_schedule) {
        s.schedule = SecureRandomMode{11, 0.25};
    } else {
        s.schedule = PredictableMode{2500};
    }
    HijackerSpec h;
    h.node = "H";
    h.strategy = Frame{"b"};
    h.knowledge = Knowledge::Blind;
    h.start_time = 300.0;
    s.hijacker = h;
    s.verification_delay = 50.0;
    s.duration = 700.0;
    s.time_step = 1.0;
    return s;
}

/// QEC line with a detour that only exists around the true hijacker:
/// end-to-end identification narrows to three suspects, phase 4 reinstates
/// the two innocents.
inline ScenarioConfig qec_narrowed_scenario() {
    ScenarioConfig s;
    s.nodes = {"a", "b", "c", "d", "e", "x"};
    s.links = {{"a", "b", 1.0, 0.9}, {"b", "c", 1.0, 0.9}, {"c", "d", 1.0, 0.9},
               {"d", "e", 1.0, 0.9}, {"b", "x", 1.0, 0.9}, {"x", "d", 1.0, 0.9}};
    ConnectionSpec c1;
    c1.id = "c1";
    c1.from = "a";
    c1.to = "e";
    c1.rate = 1.0;
    c1.model = QecModel{3};
    s.connections = {c1};
    s.capacity = 1000.0;
    s.window.bursts = 200;
    s.window.mean_interval = 1.0;
    s.window.burst_pairs = 10;
    s.window.conn_bursts = 100000000;
    s.window.conn_mean_interval = 1.0;
    s.window.jitter = 0.0;
    s.cost_model = ConstantCost{2000.0};
    HijackerSpec h;
    h.node = "c";
    h.strategy = CorruptAll{};
    h.start_time = 300.0;
    s.hijacker = h;
    s.verification_delay = 60.0;
    s.duration = 700.0;
    s.time_step = 1.0;
    return s;
}

} // namespace fixtures
