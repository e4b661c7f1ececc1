#include "qrsim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qrsim/rng.hpp"

namespace qrsim {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ValidationError(where + ": unknown key \"" + key + "\"");
        }
    }
    for (const std::string& key : required) {
        if (!obj.contains(key)) {
            throw ValidationError(where + ": missing required key \"" + key + "\"");
        }
    }
}

CostModel parse_cost_model(const json& obj) {
    require_keys(obj, "tomography.cost_model",
                 {"type", "pairs", "base", "slope", "points"}, {"type"});
    const std::string type = obj.at("type").get<std::string>();
    if (type == "constant") {
        require_keys(obj, "constant cost model", {"type", "pairs"}, {"type", "pairs"});
        return ConstantCost{obj.at("pairs").get<double>()};
    }
    if (type == "affine") {
        require_keys(obj, "affine cost model", {"type", "base", "slope"},
                     {"type", "base", "slope"});
        return AffineCost{obj.at("base").get<double>(), obj.at("slope").get<double>()};
    }
    if (type == "table") {
        require_keys(obj, "table cost model", {"type", "points"}, {"type", "points"});
        TableCost table;
        for (const auto& row : obj.at("points")) {
            if (!row.is_array() || row.size() != 2) {
                throw ValidationError("table cost points must be [f_min, pairs] rows");
            }
            table.points.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        return table;
    }
    throw ValidationError("cost model type must be constant, affine or table");
}

json dump_cost_model(const CostModel& model) {
    if (const auto* c = std::get_if<ConstantCost>(&model)) {
        return json{{"type", "constant"}, {"pairs", c->pairs}};
    }
    if (const auto* a = std::get_if<AffineCost>(&model)) {
        return json{{"type", "affine"}, {"base", a->base}, {"slope", a->slope}};
    }
    const auto& t = std::get<TableCost>(model);
    json points = json::array();
    for (const auto& [f, pairs] : t.points) points.push_back(json::array({f, pairs}));
    return json{{"type", "table"}, {"points", points}};
}

ScheduleMode parse_schedule(const json& obj) {
    require_keys(obj, "schedule", {"mode", "block", "seed", "probability"}, {"mode"});
    const std::string mode = obj.at("mode").get<std::string>();
    if (mode == "predictable") {
        return PredictableMode{obj.value("block", std::int64_t{10})};
    }
    if (mode == "secure_random") {
        return SecureRandomMode{obj.value("seed", std::uint64_t{0}),
                                obj.value("probability", 0.1)};
    }
    throw ValidationError("schedule mode must be predictable or secure_random");
}

json dump_schedule(const ScheduleMode& mode) {
    if (const auto* p = std::get_if<PredictableMode>(&mode)) {
        return json{{"mode", "predictable"}, {"block", p->block}};
    }
    const auto& s = std::get<SecureRandomMode>(mode);
    return json{{"mode", "secure_random"}, {"seed", s.seed}, {"probability", s.probability}};
}

RepeaterModel parse_model(const json& obj, const std::string& id) {
    require_keys(obj, "connection " + id + " model", {"type", "exponent", "distance"}, {"type"});
    const std::string type = obj.at("type").get<std::string>();
    if (type == "es") return EsModel{obj.value("exponent", 1.0)};
    if (type == "qec") {
        if (!obj.contains("distance")) {
            throw ValidationError("connection " + id + ": qec model needs a code distance");
        }
        return QecModel{obj.at("distance").get<int>()};
    }
    throw ValidationError("connection " + id + ": model type must be es or qec");
}

json dump_model(const RepeaterModel& model) {
    if (const auto* es = std::get_if<EsModel>(&model)) {
        return json{{"type", "es"}, {"exponent", es->path_exponent}};
    }
    return json{{"type", "qec"}, {"distance", std::get<QecModel>(model).code_distance}};
}

HijackerSpec parse_hijacker(const json& obj) {
    require_keys(obj, "hijacker",
                 {"node", "strategy", "knowledge", "start_time", "active_intervals", "seed"},
                 {"node", "strategy", "start_time"});
    HijackerSpec spec;
    spec.node = obj.at("node").get<std::string>();
    spec.start_time = obj.at("start_time").get<double>();
    spec.seed = obj.value("seed", std::uint64_t{0});

    const json& st = obj.at("strategy");
    require_keys(st, "hijacker.strategy", {"type", "id", "victim", "blind_rate"}, {"type"});
    const std::string type = st.at("type").get<std::string>();
    if (type == "corrupt_all") {
        spec.strategy = CorruptAll{};
    } else if (type == "target_connection") {
        if (!st.contains("id")) throw ValidationError("target_connection needs a connection id");
        spec.strategy = TargetConnection{st.at("id").get<std::string>()};
    } else if (type == "frame") {
        if (!st.contains("victim")) throw ValidationError("frame strategy needs a victim");
        spec.strategy = Frame{st.at("victim").get<std::string>(), st.value("blind_rate", 0.9)};
    } else {
        throw ValidationError("strategy type must be corrupt_all, target_connection or frame");
    }

    const std::string knowledge = obj.value("knowledge", std::string("blind"));
    if (knowledge == "blind") {
        spec.knowledge = Knowledge::Blind;
    } else if (knowledge == "knows_schedule") {
        spec.knowledge = Knowledge::KnowsSchedule;
    } else {
        throw ValidationError("knowledge must be blind or knows_schedule");
    }

    if (obj.contains("active_intervals")) {
        for (const auto& row : obj.at("active_intervals")) {
            if (!row.is_array() || row.size() != 2) {
                throw ValidationError("active_intervals must hold [begin, end] rows");
            }
            spec.active_intervals.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    }
    return spec;
}

json dump_hijacker(const HijackerSpec& spec) {
    json strategy;
    if (std::holds_alternative<CorruptAll>(spec.strategy)) {
        strategy = json{{"type", "corrupt_all"}};
    } else if (const auto* t = std::get_if<TargetConnection>(&spec.strategy)) {
        strategy = json{{"type", "target_connection"}, {"id", t->connection_id}};
    } else {
        const auto& f = std::get<Frame>(spec.strategy);
        strategy = json{{"type", "frame"}, {"victim", f.victim}, {"blind_rate", f.blind_rate}};
    }
    json out{{"node", spec.node},
             {"strategy", strategy},
             {"knowledge", spec.knowledge == Knowledge::Blind ? "blind" : "knows_schedule"},
             {"start_time", spec.start_time},
             {"seed", spec.seed}};
    if (!spec.active_intervals.empty()) {
        json rows = json::array();
        for (const auto& [a, b] : spec.active_intervals) rows.push_back(json::array({a, b}));
        out["active_intervals"] = rows;
    }
    return out;
}

} // namespace

ScenarioConfig parse_scenario(const json& doc) {
    require_keys(doc, "scenario",
                 {"topology", "connections", "capacity", "window", "tomography", "schedule",
                  "hijacker", "phases", "shedding", "run", "output", "overrides"},
                 {"topology", "capacity", "window", "run"});
    ScenarioConfig config;

    const json& topo = doc.at("topology");
    require_keys(topo, "topology", {"nodes", "links"}, {"nodes", "links"});
    config.nodes = topo.at("nodes").get<std::vector<std::string>>();
    for (const auto& row : topo.at("links")) {
        require_keys(row, "link", {"a", "b", "cost", "fidelity"}, {"a", "b"});
        LinkSpec link;
        link.a = row.at("a").get<std::string>();
        link.b = row.at("b").get<std::string>();
        link.cost = row.value("cost", 1.0);
        link.fidelity = row.value("fidelity", 1.0);
        config.links.push_back(link);
    }

    if (doc.contains("connections")) {
        for (const auto& row : doc.at("connections")) {
            require_keys(row, "connection",
                         {"id", "from", "to", "rate", "model", "priority", "rate_after_reroute"},
                         {"id", "from", "to", "rate", "model"});
            ConnectionSpec c;
            c.id = row.at("id").get<std::string>();
            c.from = row.at("from").get<std::string>();
            c.to = row.at("to").get<std::string>();
            c.rate = row.at("rate").get<double>();
            c.model = parse_model(row.at("model"), c.id);
            c.priority = row.value("priority", 0);
            if (row.contains("rate_after_reroute") && !row.at("rate_after_reroute").is_null()) {
                c.reroute_rate = row.at("rate_after_reroute").get<double>();
            }
            config.connections.push_back(c);
        }
    }

    config.capacity = doc.at("capacity").get<double>();

    const json& win = doc.at("window");
    require_keys(win, "window", {"w", "m", "burst", "w_conn", "m_conn", "jitter"},
                 {"w", "m", "burst"});
    config.window.bursts = win.at("w").get<std::int64_t>();
    config.window.mean_interval = win.at("m").get<double>();
    config.window.burst_pairs = win.at("burst").get<std::int64_t>();
    config.window.conn_bursts = win.value("w_conn", config.window.bursts);
    config.window.conn_mean_interval = win.value("m_conn", config.window.mean_interval);
    config.window.jitter = win.value("jitter", 0.25);

    if (doc.contains("tomography")) {
        const json& tomo = doc.at("tomography");
        require_keys(tomo, "tomography", {"cost_model", "pair_accounting"}, {});
        if (tomo.contains("cost_model")) config.cost_model = parse_cost_model(tomo.at("cost_model"));
        const std::string acc = tomo.value("pair_accounting", std::string("squared"));
        if (acc == "squared") {
            config.accounting = PairAccounting::Squared;
        } else if (acc == "linear") {
            config.accounting = PairAccounting::Linear;
        } else {
            throw ValidationError("pair_accounting must be squared or linear");
        }
    }

    if (doc.contains("schedule")) config.schedule = parse_schedule(doc.at("schedule"));
    if (doc.contains("hijacker") && !doc.at("hijacker").is_null()) {
        config.hijacker = parse_hijacker(doc.at("hijacker"));
    }

    if (doc.contains("phases")) {
        require_keys(doc.at("phases"), "phases", {"verification_delay"}, {});
        config.verification_delay = doc.at("phases").value("verification_delay", 100.0);
    }

    if (doc.contains("shedding")) {
        require_keys(doc.at("shedding"), "shedding", {"policy"}, {"policy"});
        const std::string policy = doc.at("shedding").at("policy").get<std::string>();
        if (policy != "priority_then_work") {
            throw ValidationError("shedding policy must be priority_then_work");
        }
        config.shedding = SheddingPolicy::PriorityThenWork;
    }

    const json& run_obj = doc.at("run");
    require_keys(run_obj, "run", {"duration", "time_step"}, {"duration"});
    config.duration = run_obj.at("duration").get<double>();
    config.time_step = run_obj.value("time_step", 1.0);

    if (doc.contains("output")) {
        require_keys(doc.at("output"), "output", {"dir"}, {});
        config.output_dir = doc.at("output").value("dir", std::string());
    }

    if (doc.contains("overrides")) {
        const json& ov = doc.at("overrides");
        require_keys(ov, "overrides", {"c_sus", "r_sus", "c_k", "r_k"}, {});
        if (ov.contains("c_sus") && !ov.at("c_sus").is_null()) {
            config.overrides.capacity_sus = ov.at("c_sus").get<double>();
        }
        if (ov.contains("r_sus") && !ov.at("r_sus").is_null()) {
            config.overrides.maintenance_sus = ov.at("r_sus").get<double>();
        }
        if (ov.contains("c_k") && !ov.at("c_k").is_null()) {
            config.overrides.capacity_k = ov.at("c_k").get<double>();
        }
        if (ov.contains("r_k") && !ov.at("r_k").is_null()) {
            config.overrides.maintenance_k = ov.at("r_k").get<double>();
        }
    }
    return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw ValidationError("scenario " + path + " is not valid JSON: " + err.what());
    }
    return parse_scenario(doc);
}

nlohmann::json dump_scenario(const ScenarioConfig& config) {
    json links = json::array();
    for (const LinkSpec& l : config.links) {
        links.push_back({{"a", l.a}, {"b", l.b}, {"cost", l.cost}, {"fidelity", l.fidelity}});
    }
    json connections = json::array();
    for (const ConnectionSpec& c : config.connections) {
        json row{{"id", c.id},       {"from", c.from},
                 {"to", c.to},       {"rate", c.rate},
                 {"model", dump_model(c.model)}, {"priority", c.priority}};
        if (c.reroute_rate) row["rate_after_reroute"] = *c.reroute_rate;
        connections.push_back(row);
    }
    json doc{{"topology", {{"nodes", config.nodes}, {"links", links}}},
             {"connections", connections},
             {"capacity", config.capacity},
             {"window",
              {{"w", config.window.bursts},
               {"m", config.window.mean_interval},
               {"burst", config.window.burst_pairs},
               {"w_conn", config.window.conn_bursts},
               {"m_conn", config.window.conn_mean_interval},
               {"jitter", config.window.jitter}}},
             {"tomography",
              {{"cost_model", dump_cost_model(config.cost_model)},
               {"pair_accounting",
                config.accounting == PairAccounting::Squared ? "squared" : "linear"}}},
             {"schedule", dump_schedule(config.schedule)},
             {"phases", {{"verification_delay", config.verification_delay}}},
             {"shedding", {{"policy", "priority_then_work"}}},
             {"run", {{"duration", config.duration}, {"time_step", config.time_step}}}};
    if (!config.output_dir.empty()) doc["output"] = {{"dir", config.output_dir}};
    if (config.hijacker) doc["hijacker"] = dump_hijacker(*config.hijacker);
    json overrides;
    if (config.overrides.capacity_sus) overrides["c_sus"] = *config.overrides.capacity_sus;
    if (config.overrides.maintenance_sus) overrides["r_sus"] = *config.overrides.maintenance_sus;
    if (config.overrides.capacity_k) overrides["c_k"] = *config.overrides.capacity_k;
    if (config.overrides.maintenance_k) overrides["r_k"] = *config.overrides.maintenance_k;
    if (!overrides.is_null()) doc["overrides"] = overrides;
    return doc;
}

std::string scenario_fingerprint(const ScenarioConfig& config) {
    const std::string canonical = dump_scenario(config).dump();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical)));
    return buf;
}

} // namespace qrsim
