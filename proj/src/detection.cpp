#include "qrsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qrsim/rng.hpp"

namespace qrsim {

SwapTree::SwapTree(Path path) : path_(std::move(path)) {
    if (path_.nodes.size() < 2) throw std::invalid_argument("a swap tree needs at least one link");
    root_ = build(0, path_.nodes.size() - 1);
}

int SwapTree::build(std::size_t i, std::size_t j) {
    Node node;
    node.seg = Segment{i, j};
    if (j - i == 1) {
        node.level = 0;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size() - 1);
    }
    const std::size_t mid = (i + j + 1) / 2;
    node.swap_node = path_.nodes[mid];
    node.left = build(i, mid);
    node.right = build(mid, j);
    node.level = 1 + std::max(nodes_[node.left].level, nodes_[node.right].level);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
}

const SwapTree::Node& SwapTree::at(const Segment& seg) const {
    for (const Node& n : nodes_) {
        if (n.seg == seg) return n;
    }
    throw std::invalid_argument("segment not in swap tree");
}

bool SwapTree::has(const Segment& seg) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [&](const Node& n) { return n.seg == seg; });
}

std::vector<Segment> SwapTree::segments() const {
    std::vector<Segment> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) out.push_back(n.seg);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SwapTree::ChainLevel> SwapTree::check_chain(std::size_t leaf_link_index) const {
    if (leaf_link_index + 1 >= path_.nodes.size()) {
        throw std::invalid_argument("leaf link index out of range");
    }
    const Segment leaf{leaf_link_index, leaf_link_index + 1};
    std::vector<ChainLevel> chain;
    chain.push_back(ChainLevel{leaf, 0,
                               {path_.nodes[leaf_link_index], path_.nodes[leaf_link_index + 1]}});
    // Ancestors of the leaf, inner to outer.
    Segment current = leaf;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const Node& n : nodes_) {
            if (!n.swap_node) continue;
            const Node& l = nodes_[n.left];
            const Node& r = nodes_[n.right];
            if (l.seg == current || r.seg == current) {
                chain.push_back(ChainLevel{n.seg, n.level, {*n.swap_node}});
                current = n.seg;
                grew = true;
                break;
            }
        }
    }
    return chain;
}

Verdict statistical_verdict(const BellCoeffs& state, long trials, std::uint64_t seed,
                            double margin_sigmas, const ChshAngles& angles) {
    if (trials < kMinVerdictTrials) {
        throw std::invalid_argument("a CHSH verdict needs at least " +
                                    std::to_string(kMinVerdictTrials) + " trials");
    }
    const double pair_angles[4][2] = {
        {angles.theta, angles.phi},
        {angles.theta, angles.phi_prime},
        {angles.theta_prime, angles.phi},
        {angles.theta_prime, angles.phi_prime},
    };
    const double sign[4] = {+1.0, -1.0, +1.0, +1.0};

    double expectation[4];
    for (int k = 0; k < 4; ++k) {
        expectation[k] = correlation(state, pair_angles[k][0], pair_angles[k][1]);
    }

    long counts[4] = {0, 0, 0, 0};
    long product_sum[4] = {0, 0, 0, 0};
    SplitMix64 rng(seed);
    for (long t = 0; t < trials; ++t) {
        const int k = static_cast<int>(rng.below(4));
        const double p_agree = 0.5 * (1.0 + expectation[k]);
        const int product = rng.uniform() < p_agree ? 1 : -1;
        counts[k] += 1;
        product_sum[k] += product;
    }

    double s_hat = 0.0;
    double variance = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (counts[k] == 0) return Verdict::Pass; // no evidence on one basis pair
        const double e_hat = static_cast<double>(product_sum[k]) / static_cast<double>(counts[k]);
        s_hat += sign[k] * e_hat;
        variance += (1.0 - e_hat * e_hat) / static_cast<double>(counts[k]);
    }
    const double margin = margin_sigmas * std::sqrt(variance);
    return (s_hat + margin < 2.0) ? Verdict::Fail : Verdict::Pass;
}

SuspectReport identify_es(const SwapTree& tree, const std::vector<CheckResult>& results) {
    std::map<Segment, Verdict> verdicts;
    for (const CheckResult& r : results) {
        if (!tree.has(r.seg)) {
            throw std::invalid_argument("check result for a segment outside the tree");
        }
        if (!verdicts.emplace(r.seg, r.verdict).second) {
            throw std::invalid_argument("duplicate check result for one segment");
        }
    }
    for (const Segment& seg : tree.segments()) {
        if (!verdicts.count(seg)) {
            throw std::invalid_argument("results must cover every tree segment");
        }
    }

    const auto failed = [&](const Segment& s) { return verdicts.at(s) == Verdict::Fail; };

    // Pass above a Fail anywhere below it is contradictory evidence.
    bool inconsistent = false;
    const std::function<bool(int)> any_fail_below = [&](int idx) -> bool {
        const auto& n = tree.tree()[idx];
        if (failed(n.seg)) return true;
        if (n.left < 0) return false;
        return any_fail_below(n.left) || any_fail_below(n.right);
    };
    for (const auto& n : tree.tree()) {
        if (n.left < 0 || failed(n.seg)) continue;
        if (any_fail_below(n.left) || any_fail_below(n.right)) inconsistent = true;
    }

    std::vector<std::set<NodeId>> findings;
    bool any_fail = false;
    for (const auto& n : tree.tree()) {
        if (!failed(n.seg)) continue;
        any_fail = true;
        const bool minimal = n.left < 0 || (!failed(tree.tree()[n.left].seg) &&
                                            !failed(tree.tree()[n.right].seg));
        if (!minimal) continue;
        if (n.swap_node) {
            findings.push_back({*n.swap_node});
        } else {
            findings.push_back({tree.path().nodes[n.seg.i], tree.path().nodes[n.seg.j]});
        }
    }

    SuspectReport report;
    if (!any_fail) {
        report.tag = SuspectReport::Tag::Undetermined;
        return report;
    }

    std::set<NodeId> intersection = findings.front();
    std::set<NodeId> united;
    for (const auto& f : findings) {
        united.insert(f.begin(), f.end());
        std::set<NodeId> next;
        std::set_intersection(intersection.begin(), intersection.end(), f.begin(), f.end(),
                              std::inserter(next, next.begin()));
        intersection = std::move(next);
    }
    const std::set<NodeId>& chosen = intersection.empty() ? united : intersection;
    report.candidates.assign(chosen.begin(), chosen.end());
    if (inconsistent) {
        report.tag = SuspectReport::Tag::Undetermined;
    } else if (report.candidates.size() == 1) {
        report.tag = SuspectReport::Tag::Identified;
    } else {
        report.tag = SuspectReport::Tag::Narrowed;
    }
    return report;
}

SuspectReport identify_qec(const std::vector<EndToEndCheck>& checks) {
    if (checks.empty()) throw std::invalid_argument("at least one end-to-end verdict is required");
    SuspectReport report;
    std::optional<std::set<NodeId>> intersection;
    std::set<NodeId> cleared;
    std::set<NodeId> termini;
    for (const EndToEndCheck& c : checks) {
        if (c.verdict == Verdict::Fail) {
            std::set<NodeId> nodes(c.path.nodes.begin(), c.path.nodes.end());
            if (!intersection) {
                intersection = std::move(nodes);
            } else {
                std::set<NodeId> next;
                std::set_intersection(intersection->begin(), intersection->end(), nodes.begin(),
                                      nodes.end(), std::inserter(next, next.begin()));
                intersection = std::move(next);
            }
            termini.insert(c.path.nodes.front());
            termini.insert(c.path.nodes.back());
        } else {
            for (const NodeId& n : c.path.interior()) cleared.insert(n);
        }
    }
    if (!intersection) {
        report.tag = SuspectReport::Tag::Undetermined;
        return report;
    }
    for (const NodeId& n : *intersection) {
        if (!cleared.count(n) && !termini.count(n)) report.candidates.push_back(n);
    }
    if (report.candidates.empty()) {
        report.tag = SuspectReport::Tag::Undetermined;
    } else if (report.candidates.size() == 1) {
        report.tag = SuspectReport::Tag::Identified;
    } else {
        report.tag = SuspectReport::Tag::Narrowed;
    }
    return report;
}

namespace {

std::string verdict_name(Verdict v) { return v == Verdict::Pass ? "pass" : "fail"; }

Verdict verdict_from(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    throw ValidationError("verdict must be \"pass\" or \"fail\", got \"" + s + "\"");
}

} // namespace

nlohmann::json es_check_log(const SwapTree& tree, const std::vector<CheckResult>& results) {
    nlohmann::json doc;
    doc["model"] = "es";
    doc["path"] = tree.path().nodes;
    nlohmann::json rows = nlohmann::json::array();
    for (const CheckResult& r : results) {
        rows.push_back({{"level", r.level},
                        {"i", r.seg.i},
                        {"j", r.seg.j},
                        {"verdict", verdict_name(r.verdict)},
                        {"n", r.samples}});
    }
    doc["results"] = rows;
    return doc;
}

nlohmann::json qec_check_log(const std::vector<EndToEndCheck>& checks) {
    nlohmann::json doc;
    doc["model"] = "qec";
    nlohmann::json rows = nlohmann::json::array();
    for (const EndToEndCheck& c : checks) {
        rows.push_back({{"path", c.path.nodes}, {"verdict", verdict_name(c.verdict)}});
    }
    doc["connections"] = rows;
    return doc;
}

ParsedCheckLog parse_check_log(const nlohmann::json& doc) {
    ParsedCheckLog log;
    if (!doc.is_object() || !doc.contains("model")) {
        throw ValidationError("check log must be an object with a \"model\" field");
    }
    const std::string model = doc.at("model").get<std::string>();
    if (model == "es") {
        log.is_es = true;
        Path path{doc.at("path").get<std::vector<NodeId>>()};
        log.tree.emplace(std::move(path));
        for (const auto& row : doc.at("results")) {
            CheckResult r;
            r.level = row.at("level").get<int>();
            r.seg = Segment{row.at("i").get<std::size_t>(), row.at("j").get<std::size_t>()};
            r.verdict = verdict_from(row.at("verdict").get<std::string>());
            r.samples = row.value("n", 0L);
            log.results.push_back(r);
        }
    } else if (model == "qec") {
        log.is_es = false;
        for (const auto& row : doc.at("connections")) {
            EndToEndCheck c;
            c.path.nodes = row.at("path").get<std::vector<NodeId>>();
            c.verdict = verdict_from(row.at("verdict").get<std::string>());
            log.qec_checks.push_back(c);
        }
    } else {
        throw ValidationError("check log model must be \"es\" or \"qec\"");
    }
    return log;
}

nlohmann::json report_json(const SuspectReport& report) {
    const char* tag = report.tag == SuspectReport::Tag::Identified    ? "identified"
                      : report.tag == SuspectReport::Tag::Narrowed   ? "narrowed"
                                                                     : "undetermined";
    return nlohmann::json{{"suspects", report.candidates}, {"tag", tag}};
}

} // namespace qrsim
