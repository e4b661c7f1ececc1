// Command-line front end: curve emission, scenario simulation runs, and
// offline analysis of check logs and framing cuts.
//
// Exit codes: 0 success, 1 I/O failure, 2 validation failure,
// 3 simulation-level failure.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrsim/bell.hpp"
#include "qrsim/detection.hpp"
#include "qrsim/engine.hpp"
#include "qrsim/graph.hpp"
#include "qrsim/scenario.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSimulation = 3;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw qrsim::IoError("cannot write " + path);
    out << text;
}

struct CurveRange {
    double from = 0.5;
    double to = 1.0;
    double step = 0.01;
};

int run_math(const std::string& what, const CurveRange& range, const std::string& out,
             const std::string& format, qrsim::PairAccounting accounting) {
    if (what == "thresholds") {
        const double raw = qrsim::chsh_violation_threshold(qrsim::PipelineStage::Raw);
        const double once = qrsim::chsh_violation_threshold(qrsim::PipelineStage::Once);
        const double twice = qrsim::chsh_violation_threshold(qrsim::PipelineStage::Twice);
        if (format == "json") {
            write_text(out, json{{"raw", raw}, {"once", once}, {"twice", twice}}.dump(2) + "\n");
        } else {
            std::string csv = "stage,f_threshold\n";
            csv += "raw," + fmt(raw) + "\n";
            csv += "once," + fmt(once) + "\n";
            csv += "twice," + fmt(twice) + "\n";
            write_text(out, csv);
        }
        return kExitOk;
    }
    const auto rows = qrsim::purification_curve(range.from, range.to, range.step, accounting);
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            if (what == "purification") {
                arr.push_back({{"f", r.f}, {"f_once", r.f_once}, {"f_twice", r.f_twice},
                               {"e_of_f", r.e_of_f}, {"s_raw", r.s_raw},
                               {"s_once", r.s_once}, {"s_twice", r.s_twice}});
            } else {
                arr.push_back({{"f", r.f}, {"s_raw", r.s_raw}, {"s_once", r.s_once},
                               {"s_twice", r.s_twice}});
            }
        }
        write_text(out, arr.dump(2) + "\n");
        return kExitOk;
    }
    std::string csv;
    if (what == "purification") {
        csv = "f,f_once,f_twice,e_of_f,s_raw,s_once,s_twice\n";
        for (const auto& r : rows) {
            csv += fmt(r.f) + "," + fmt(r.f_once) + "," + fmt(r.f_twice) + "," +
                   fmt(r.e_of_f) + "," + fmt(r.s_raw) + "," + fmt(r.s_once) + "," +
                   fmt(r.s_twice) + "\n";
        }
    } else {
        csv = "f,s_raw,s_once,s_twice\n";
        for (const auto& r : rows) {
            csv += fmt(r.f) + "," + fmt(r.s_raw) + "," + fmt(r.s_once) + "," +
                   fmt(r.s_twice) + "\n";
        }
    }
    write_text(out, csv);
    return kExitOk;
}

int run_simulate(const std::string& scenario_path, std::uint64_t seed,
                 std::optional<std::pair<std::uint64_t, std::uint64_t>> seeds,
                 const std::string& out_dir, bool dump_config) {
    const qrsim::ScenarioConfig config = qrsim::load_scenario_file(scenario_path);
    if (dump_config) {
        std::cout << qrsim::dump_scenario(config).dump(2) << "\n";
        return kExitOk;
    }
    const std::string hash = qrsim::scenario_fingerprint(config);

    std::vector<std::uint64_t> run_seeds;
    if (seeds) {
        for (std::uint64_t s = seeds->first; s <= seeds->second; ++s) run_seeds.push_back(s);
    } else {
        run_seeds.push_back(seed);
    }

    // Seed sweeps fan out; runs share nothing and merge by (hash, seed).
    std::vector<std::future<qrsim::SimulationTimeline>> futures;
    futures.reserve(run_seeds.size());
    for (std::uint64_t s : run_seeds) {
        futures.push_back(std::async(std::launch::async, [&config, s] {
            return qrsim::run(config, s);
        }));
    }

    const std::string chosen_dir =
        !out_dir.empty() ? out_dir : (!config.output_dir.empty() ? config.output_dir : ".");
    std::filesystem::path dir(chosen_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw qrsim::IoError("cannot create output directory " + dir.string());

    json merged;
    merged["scenario_hash"] = hash;
    json runs = json::object();
    for (std::size_t i = 0; i < futures.size(); ++i) {
        qrsim::SimulationTimeline timeline = futures[i].get();
        timeline.scenario_hash = hash;
        const std::string tag = run_seeds.size() == 1
                                    ? std::string()
                                    : "_" + std::to_string(run_seeds[i]);
        write_text((dir / ("timeline" + tag + ".csv")).string(), qrsim::timeline_csv(timeline));
        write_text((dir / ("events" + tag + ".json")).string(),
                   qrsim::events_json(timeline).dump(2) + "\n");
        const json summary = qrsim::summary_json(timeline);
        write_text((dir / ("summary" + tag + ".json")).string(), summary.dump(2) + "\n");
        runs[hash + ":" + std::to_string(run_seeds[i])] = summary;
        std::cout << "seed " << run_seeds[i] << ": phase-2 slack "
                  << fmt(timeline.summary.phase2_slack) << " pairs/s";
        if (timeline.summary.detection_lag) {
            std::cout << ", detection lag " << fmt(*timeline.summary.detection_lag) << " s";
        }
        std::cout << "\n";
    }
    if (run_seeds.size() > 1) {
        merged["runs"] = runs;
        write_text((dir / "summary_merged.json").string(), merged.dump(2) + "\n");
    }
    return kExitOk;
}

int run_analyze_identify(const std::string& log_path, const std::string& out,
                         const std::string& format) {
    std::ifstream in(log_path);
    if (!in) throw qrsim::IoError("cannot open check log " + log_path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw qrsim::ValidationError(std::string("check log is not valid JSON: ") + err.what());
    }
    const qrsim::ParsedCheckLog log = qrsim::parse_check_log(doc);
    qrsim::SuspectReport report;
    if (log.is_es) {
        if (log.results.empty()) {
            report.tag = qrsim::SuspectReport::Tag::Undetermined; // empty log, no suspects
        } else {
            report = qrsim::identify_es(*log.tree, log.results);
        }
    } else {
        report = qrsim::identify_qec(log.qec_checks);
    }
    if (format == "csv") {
        std::string csv = "suspect\n";
        for (const auto& n : report.candidates) csv += n + "\n";
        write_text(out, csv);
    } else {
        write_text(out, qrsim::report_json(report).dump(2) + "\n");
    }
    return kExitOk;
}

int run_analyze_framing(const std::string& scenario_path, const std::string& hijacker,
                        int budget, const std::string& out) {
    const qrsim::ScenarioConfig config = qrsim::load_scenario_file(scenario_path);
    const qrsim::NetworkGraph graph = qrsim::NetworkGraph::build(config.nodes, config.links);
    std::vector<std::pair<qrsim::NodeId, qrsim::NodeId>> pairs;
    for (const auto& c : config.connections) pairs.emplace_back(c.from, c.to);
    const auto cut = qrsim::framing_cut_search(graph, hijacker, pairs, budget);
    json doc{{"hijacker", hijacker}, {"budget", budget}};
    json edges = json::array();
    for (const auto& [key, link] : graph.links()) {
        edges.push_back(json::array({key.first, key.second}));
    }
    doc["links"] = edges;
    if (cut) {
        doc["cut"] = *cut;
        std::set<qrsim::NodeId> cut_set(cut->begin(), cut->end());
        const auto check = qrsim::partition_check(graph, cut_set, pairs);
        json statuses = json::array();
        for (const auto& p : check.pairs) {
            statuses.push_back({{"a", p.a}, {"b", p.b}, {"reachable", p.reachable}});
        }
        doc["pairs_after_isolation"] = statuses;
        doc["network_partitioned"] = check.network_partitioned;
    } else {
        doc["cut"] = nullptr;
    }
    write_text(out, doc.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum repeater network hijack simulator"};
    app.require_subcommand(1);

    // math
    auto* math = app.add_subcommand("math", "Emit purification / CHSH curves and thresholds");
    math->require_subcommand(1);
    CurveRange range;
    std::string math_out = "-";
    std::string math_format = "csv";
    std::string accounting_name = "squared";
    for (const char* name : {"purification", "chsh", "thresholds"}) {
        auto* sub = math->add_subcommand(name);
        if (std::string(name) != "thresholds") {
            sub->add_option("--from", range.from, "Start fidelity (exclusive of 0.25)");
            sub->add_option("--to", range.to, "End fidelity (inclusive, <= 1)");
            sub->add_option("--step", range.step, "Fidelity step");
            sub->add_option("--pair-accounting", accounting_name,
                            "Expected-pair accounting: squared or linear");
        }
        sub->add_option("--out", math_out, "Output path, - for stdout");
        sub->add_option("--format", math_format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a scenario");
    std::string scenario_path;
    std::uint64_t seed = 1;
    std::string seeds_spec;
    std::string out_dir;
    bool dump_config = false;
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--seed", seed, "Run seed");
    simulate->add_option("--seeds", seeds_spec, "Seed sweep a..b, runs fan out concurrently");
    simulate->add_option("--out", out_dir, "Output directory");
    simulate->add_flag("--dump-config", dump_config,
                       "Print the canonical parsed configuration and exit");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Offline analysis");
    analyze->require_subcommand(1);
    auto* identify = analyze->add_subcommand("identify", "Identify suspects from a check log");
    std::string log_path;
    std::string analyze_out = "-";
    std::string analyze_format = "json";
    identify->add_option("--log", log_path, "Check log JSON file")->required();
    identify->add_option("--out", analyze_out, "Output path, - for stdout");
    identify->add_option("--format", analyze_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    auto* framing = analyze->add_subcommand("framing-cuts",
                                            "Search for network-severing framing sets");
    std::string framing_scenario;
    std::string framing_hijacker;
    int framing_budget = 4;
    framing->add_option("--scenario", framing_scenario, "Scenario JSON file")->required();
    framing->add_option("--hijacker", framing_hijacker, "Hijacked node id")->required();
    framing->add_option("--budget", framing_budget, "Maximum cut size (<= 12)");
    framing->add_option("--out", analyze_out, "Output path, - for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (math->parsed()) {
            qrsim::PairAccounting accounting;
            if (accounting_name == "squared") {
                accounting = qrsim::PairAccounting::Squared;
            } else if (accounting_name == "linear") {
                accounting = qrsim::PairAccounting::Linear;
            } else {
                throw qrsim::ValidationError("pair accounting must be squared or linear");
            }
            for (const char* name : {"purification", "chsh", "thresholds"}) {
                if (math->get_subcommand(name)->parsed()) {
                    return run_math(name, range, math_out, math_format, accounting);
                }
            }
        }
        if (simulate->parsed()) {
            std::optional<std::pair<std::uint64_t, std::uint64_t>> sweep;
            if (!seeds_spec.empty()) {
                const auto sep = seeds_spec.find("..");
                if (sep == std::string::npos) {
                    throw qrsim::ValidationError("--seeds expects the form a..b");
                }
                sweep = std::make_pair(std::stoull(seeds_spec.substr(0, sep)),
                                       std::stoull(seeds_spec.substr(sep + 2)));
                if (sweep->first > sweep->second) {
                    throw qrsim::ValidationError("--seeds range must satisfy a <= b");
                }
            }
            return run_simulate(scenario_path, seed, sweep, out_dir, dump_config);
        }
        if (analyze->parsed()) {
            if (identify->parsed()) {
                return run_analyze_identify(log_path, analyze_out, analyze_format);
            }
            return run_analyze_framing(framing_scenario, framing_hijacker, framing_budget,
                                       analyze_out);
        }
    } catch (const qrsim::IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitIo;
    } catch (const qrsim::ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitSimulation;
    }
    return kExitOk;
}
