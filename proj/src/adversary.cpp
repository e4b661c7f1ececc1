#include "qrsim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qrsim/rng.hpp"

namespace qrsim {

namespace {

bool in_intervals(const std::vector<std::pair<double, double>>& intervals, double t) {
    if (intervals.empty()) return true;
    return std::any_of(intervals.begin(), intervals.end(),
                       [t](const auto& iv) { return t >= iv.first && t < iv.second; });
}

bool can_target(const HijackerSpec& spec, const CheckSchedule& schedule) {
    // A predictable schedule is readable by anyone; otherwise the hijacker
    // needs the generator seed.
    return spec.knowledge == Knowledge::KnowsSchedule || schedule.predictable();
}

BellCoeffs mix_states(const BellCoeffs& base, double corrupted_fraction) {
    const BellCoeffs bad = hijacked_state();
    const double a = corrupted_fraction;
    return BellCoeffs(
        (1.0 - a) * base.phi_plus() + a * bad.phi_plus(),
        (1.0 - a) * base.psi_plus() + a * bad.psi_plus(),
        (1.0 - a) * base.psi_minus() + a * bad.psi_minus(),
        (1.0 - a) * base.phi_minus() + a * bad.phi_minus());
}

} // namespace

bool hijacker_active(const HijackerSpec& spec, double t) {
    return t >= spec.start_time && in_intervals(spec.active_intervals, t);
}

std::vector<std::size_t> corrupt_stream(const HijackerSpec& spec, const CheckSchedule& schedule,
                                        const PairStream& stream) {
    if (!stream.path.contains(spec.node)) {
        throw std::invalid_argument("hijacker " + spec.node + " does not touch this stream");
    }
    if (schedule.length() != stream.length) {
        throw std::invalid_argument("schedule and stream lengths differ");
    }

    const auto active_at_index = [&](std::size_t i) {
        const double t = stream.start_time + static_cast<double>(i) * stream.seconds_per_pair;
        return in_intervals(spec.active_intervals, t) && t >= spec.start_time;
    };

    std::vector<std::size_t> corrupted;
    if (std::holds_alternative<CorruptAll>(spec.strategy)) {
        for (std::size_t i = 0; i < stream.length; ++i) {
            if (active_at_index(i)) corrupted.push_back(i);
        }
        return corrupted;
    }
    if (const auto* target = std::get_if<TargetConnection>(&spec.strategy)) {
        if (stream.connection_id != target->connection_id) return corrupted;
        for (std::size_t i = 0; i < stream.length; ++i) {
            if (active_at_index(i)) corrupted.push_back(i);
        }
        return corrupted;
    }

    const auto& frame = std::get<Frame>(spec.strategy);
    if (can_target(spec, schedule)) {
        // Levels whose check implicates the victim and not the hijacker.
        std::set<int> chosen;
        for (std::size_t l = 0; l < stream.chain.size(); ++l) {
            const auto& nodes = stream.chain[l].implicated;
            const bool hits_victim =
                std::find(nodes.begin(), nodes.end(), frame.victim) != nodes.end();
            const bool hits_self =
                std::find(nodes.begin(), nodes.end(), spec.node) != nodes.end();
            if (hits_victim && !hits_self) chosen.insert(static_cast<int>(l));
        }
        for (std::size_t i = 0; i < stream.length; ++i) {
            if (chosen.count(schedule.level_of(i)) && active_at_index(i)) corrupted.push_back(i);
        }
        return corrupted;
    }

    // Blind framing: the hijacker cannot tell which pairs feed which check,
    // so corruption lands uniformly over the stream.
    SplitMix64 rng(spec.seed);
    for (std::size_t i = 0; i < stream.length; ++i) {
        const bool hit = rng.uniform() < frame.blind_rate;
        if (hit && active_at_index(i)) corrupted.push_back(i);
    }
    return corrupted;
}

BellCoeffs effective_state(const BellCoeffs& base, bool corrupted) {
    return corrupted ? hijacked_state() : base;
}

bool framing_infeasible(const HijackerSpec& spec, const CheckSchedule& schedule) {
    return std::holds_alternative<Frame>(spec.strategy) && !can_target(spec, schedule);
}

FramingOutcome framing_outcome(const FramingScenario& scenario) {
    if (!std::holds_alternative<Frame>(scenario.hijacker.strategy)) {
        throw std::invalid_argument("framing_outcome requires a Frame strategy");
    }
    const auto& frame = std::get<Frame>(scenario.hijacker.strategy);
    const SwapTree tree(scenario.path);

    // Pick the stream: the first leaf link handled by the hijacker whose
    // chain contains a check that implicates the victim but not the
    // hijacker. Its existence is the Frame invariant.
    std::optional<std::size_t> leaf;
    for (std::size_t i = 0; i + 1 < scenario.path.nodes.size(); ++i) {
        if (scenario.path.nodes[i] != scenario.hijacker.node &&
            scenario.path.nodes[i + 1] != scenario.hijacker.node) {
            continue;
        }
        for (const auto& lvl : tree.check_chain(i)) {
            const auto& nodes = lvl.implicated;
            const bool hits_victim =
                std::find(nodes.begin(), nodes.end(), frame.victim) != nodes.end();
            const bool hits_self =
                std::find(nodes.begin(), nodes.end(), scenario.hijacker.node) != nodes.end();
            if (hits_victim && !hits_self) {
                leaf = i;
                break;
            }
        }
        if (leaf) break;
    }
    if (!leaf) {
        throw ValidationError("victim " + frame.victim +
                              " shares no check level with the hijacker");
    }

    PairStream stream;
    stream.path = scenario.path;
    stream.chain = tree.check_chain(*leaf);
    const std::size_t levels = stream.chain.size();

    ScheduleMode mode = scenario.schedule;
    if (auto* sec = std::get_if<SecureRandomMode>(&mode)) {
        stream.length = static_cast<std::size_t>(
            std::llround(static_cast<double>(scenario.pairs_per_level) / sec->probability));
    } else {
        auto& pred = std::get<PredictableMode>(mode);
        pred.block = scenario.pairs_per_level;
        stream.length = static_cast<std::size_t>(scenario.pairs_per_level) * levels;
    }
    const CheckSchedule schedule = make_schedule(mode, levels, stream.length);

    const std::vector<std::size_t> corrupted =
        corrupt_stream(scenario.hijacker, schedule, stream);
    const std::set<std::size_t> corrupted_set(corrupted.begin(), corrupted.end());

    FramingOutcome outcome;
    outcome.infeasible = framing_infeasible(scenario.hijacker, schedule);

    // Verdict per chain level from the checked mixture; segments off the
    // chain are checked from streams the hijacker leaves alone.
    std::set<Segment> chain_segments;
    SplitMix64 seeder(scenario.seed);
    for (std::size_t l = 0; l < levels; ++l) {
        chain_segments.insert(stream.chain[l].seg);
        const std::vector<std::size_t> indices = schedule.level_indices(l);
        long hit = 0;
        for (std::size_t idx : indices) hit += corrupted_set.count(idx) ? 1 : 0;
        const double alpha =
            indices.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(indices.size());
        const Verdict v = statistical_verdict(mix_states(scenario.check_state, alpha),
                                              static_cast<long>(indices.size()), seeder.next());
        outcome.results.push_back(CheckResult{stream.chain[l].seg, stream.chain[l].level, v,
                                              static_cast<long>(indices.size())});
    }
    for (const Segment& seg : tree.segments()) {
        if (chain_segments.count(seg)) continue;
        const Verdict v = statistical_verdict(scenario.check_state, scenario.pairs_per_level,
                                              seeder.next());
        outcome.results.push_back(
            CheckResult{seg, tree.at(seg).level, v, scenario.pairs_per_level});
    }
    outcome.blamed = identify_es(tree, outcome.results);
    return outcome;
}

SuspectReport framing_outcome_qec(const std::vector<Path>& carried,
                                  std::size_t corrupted_index) {
    if (corrupted_index >= carried.size()) {
        throw std::invalid_argument("corrupted connection index out of range");
    }
    std::vector<EndToEndCheck> checks;
    for (std::size_t i = 0; i < carried.size(); ++i) {
        checks.push_back(EndToEndCheck{carried[i],
                                       i == corrupted_index ? Verdict::Fail : Verdict::Pass});
    }
    return identify_qec(checks);
}

} // namespace qrsim
