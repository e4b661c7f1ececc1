#include "qrsim/bell.hpp"

#include <cmath>
#include <string>

namespace qrsim {

namespace {

// Outcome tables for the two purification rounds, indexed by
// [source][target] in Bell order (Phi+, Psi+, Psi-, Phi-).
// An entry is the output Bell index or -1 for a discarded outcome.
// Round one keeps both pairs in {Phi+, Phi-} or both in {Psi+, Psi-}
// (X-error suppression); round two keeps both in {Phi+, Psi+} or both
// in {Psi-, Phi-} (Z-error suppression).
constexpr int kRound1[4][4] = {
    {0, -1, -1, 3},
    {-1, 1, 2, -1},
    {-1, 2, 1, -1},
    {3, -1, -1, 0},
};

constexpr int kRound2[4][4] = {
    {0, 1, -1, -1},
    {1, 0, -1, -1},
    {-1, -1, 3, 2},
    {-1, -1, 2, 3},
};

PurificationResult apply_table(const int table[4][4], const BellCoeffs& source,
                               const BellCoeffs& target) {
    const auto& p = source.components();
    const auto& q = target.components();
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    double success = 0.0;
    for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < 4; ++t) {
            const int o = table[s][t];
            if (o < 0) continue;
            const double w = p[s] * q[t];
            out[o] += w;
            success += w;
        }
    }
    if (success <= 0.0) {
        throw NoKeepOutcomeError("purification has no kept outcome (success probability 0)");
    }
    return PurificationResult{
        BellCoeffs(out[0] / success, out[1] / success, out[2] / success, out[3] / success),
        success};
}

} // namespace

BellCoeffs::BellCoeffs(double phi_plus, double psi_plus, double psi_minus, double phi_minus)
    : c_{phi_plus, psi_plus, psi_minus, phi_minus} {
    for (double v : c_) {
        if (!(v >= 0.0)) {
            throw NormalizationError("Bell coefficient is negative or NaN: " + std::to_string(v));
        }
    }
    const double sum = c_[0] + c_[1] + c_[2] + c_[3];
    const double dev = std::abs(sum - 1.0);
    if (dev > kSumErrorTol) {
        throw NormalizationError("Bell coefficients sum to " + std::to_string(sum) +
                                 ", outside tolerance");
    }
    if (dev > 0.0) {
        for (double& v : c_) v /= sum;
    }
}

BellCoeffs werner(double f) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw std::invalid_argument("Werner fidelity must lie in [0, 1], got " + std::to_string(f));
    }
    if (f < 0.25) {
        throw UnphysicalWernerError("Werner fidelity below 1/4: " + std::to_string(f));
    }
    const double rest = (1.0 - f) / 3.0;
    return BellCoeffs(f, rest, rest, rest);
}

PurificationResult purify_round1(const BellCoeffs& source, const BellCoeffs& target) {
    return apply_table(kRound1, source, target);
}

PurificationResult purify_round2(const BellCoeffs& source, const BellCoeffs& target) {
    return apply_table(kRound2, source, target);
}

PipelineResult two_round_pipeline(double f, PairAccounting accounting) {
    if (!(f > 0.25 && f <= 1.0)) {
        throw std::invalid_argument("pipeline fidelity must lie in (0.25, 1], got " +
                                    std::to_string(f));
    }
    const BellCoeffs base = werner(f);
    const PurificationResult r1 = purify_round1(base, base);
    const PurificationResult r2 = purify_round2(r1.output, r1.output);
    const double p1 = r1.success_prob;
    const double p2 = r2.success_prob;
    const double expected = accounting == PairAccounting::Squared ? 4.0 / (p1 * p1 * p2)
                                                                  : 4.0 / (p1 * p2);
    return PipelineResult{r1.output.fidelity(), r2.output.fidelity(), p1, p2,
                          expected, r1.output, r2.output};
}

double correlation(const BellCoeffs& state, double angle_a, double angle_b) {
    return state.correlation_z() * std::cos(angle_a) * std::cos(angle_b) +
           state.correlation_x() * std::sin(angle_a) * std::sin(angle_b);
}

double chsh(const BellCoeffs& state, const ChshAngles& a) {
    return correlation(state, a.theta, a.phi) - correlation(state, a.theta, a.phi_prime) +
           correlation(state, a.theta_prime, a.phi) +
           correlation(state, a.theta_prime, a.phi_prime);
}

double chsh_crossing(const std::function<double(double)>& s_of_f, double lo, double hi) {
    double s_lo = s_of_f(lo) - 2.0;
    double s_hi = s_of_f(hi) - 2.0;
    if (s_lo == 0.0) return lo;
    if (s_hi == 0.0) return hi;
    if ((s_lo < 0.0) == (s_hi < 0.0)) {
        throw NoCrossingError("S(F) = 2 has no crossing in the bracketed range");
    }
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double s_mid = s_of_f(mid) - 2.0;
        if (s_mid == 0.0) return mid;
        if ((s_mid < 0.0) == (s_lo < 0.0)) {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double chsh_violation_threshold(PipelineStage stage, const ChshAngles& angles) {
    const auto s_of_f = [stage, &angles](double f) {
        const BellCoeffs base = werner(f);
        switch (stage) {
        case PipelineStage::Raw:
            return chsh(base, angles);
        case PipelineStage::Once:
            return chsh(purify_round1(base, base).output, angles);
        case PipelineStage::Twice: {
            const PurificationResult r1 = purify_round1(base, base);
            return chsh(purify_round2(r1.output, r1.output).output, angles);
        }
        }
        return 0.0;
    };
    // Stay strictly above the maximally mixed point so purification is defined.
    return chsh_crossing(s_of_f, 0.25 + 1e-9, 1.0);
}

BellCoeffs hijacked_state() { return BellCoeffs(0.5, 0.0, 0.0, 0.5); }

CostModel default_cost_model() { return ConstantCost{2500.0}; }

double tomography_sample_count(double f, const CostModel& model) {
    if (!(f > 0.25 && f <= 1.0)) {
        throw std::invalid_argument("tomography fidelity must lie in (0.25, 1], got " +
                                    std::to_string(f));
    }
    double pairs = 0.0;
    if (const auto* c = std::get_if<ConstantCost>(&model)) {
        pairs = c->pairs;
    } else if (const auto* a = std::get_if<AffineCost>(&model)) {
        pairs = a->base + a->slope * (1.0 - f);
    } else {
        const auto& table = std::get<TableCost>(model);
        if (table.points.empty()) {
            throw std::invalid_argument("table cost model has no entries");
        }
        pairs = table.points.front().second;
        for (const auto& [f_min, count] : table.points) {
            if (f_min <= f) pairs = count;
        }
    }
    if (!(pairs > 0.0)) {
        throw std::invalid_argument("cost model produced a non-positive pair count");
    }
    return pairs;
}

std::vector<CurvePoint> purification_curve(double f_from, double f_to, double step,
                                           PairAccounting accounting) {
    if (!(f_from > 0.25 && f_to <= 1.0 && f_from <= f_to)) {
        throw ValidationError("curve range must satisfy 0.25 < from <= to <= 1");
    }
    if (!(step > 0.0)) {
        throw ValidationError("curve step must be positive");
    }
    std::vector<CurvePoint> rows;
    const double eps = step * 1e-9;
    for (double f = f_from; f <= f_to + eps; f += step) {
        const double fc = std::min(f, f_to);
        const PipelineResult p = two_round_pipeline(fc, accounting);
        rows.push_back(CurvePoint{fc, p.f_once, p.f_twice, p.expected_pairs,
                                  chsh(werner(fc)), chsh(p.once), chsh(p.twice)});
    }
    return rows;
}

} // namespace qrsim
