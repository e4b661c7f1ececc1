#pragma once

#include <array>
#include <functional>
#include <variant>
#include <vector>

#include "qrsim/errors.hpp"

namespace qrsim {

inline constexpr double kPi = 3.14159265358979323846;

/// Normalization handling: deviations of the component sum from 1 up to
/// kSumSilentTol are expected floating-point dust; anything up to
/// kSumErrorTol is still renormalized; beyond that construction throws.
inline constexpr double kSumSilentTol = 1e-12;
inline constexpr double kSumErrorTol = 1e-9;

enum class BellState { PhiPlus = 0, PsiPlus = 1, PsiMinus = 2, PhiMinus = 3 };

/// A Bell-diagonal two-qubit state, stored as the four Bell-basis
/// probabilities in the order (Phi+, Psi+, Psi-, Phi-). Always normalized.
class BellCoeffs {
public:
    BellCoeffs(double phi_plus, double psi_plus, double psi_minus, double phi_minus);

    double phi_plus() const { return c_[0]; }
    double psi_plus() const { return c_[1]; }
    double psi_minus() const { return c_[2]; }
    double phi_minus() const { return c_[3]; }

    double component(BellState s) const { return c_[static_cast<int>(s)]; }
    const std::array<double, 4>& components() const { return c_; }

    /// F = <Phi+|rho|Phi+>.
    double fidelity() const { return c_[0]; }

    /// Diagonal correlation-tensor entries for measurements in the x-z plane.
    double correlation_z() const { return c_[0] + c_[3] - c_[1] - c_[2]; }
    double correlation_x() const { return c_[0] - c_[3] + c_[1] - c_[2]; }

private:
    std::array<double, 4> c_;
};

/// Measurement angles for the CHSH statistic, Bloch angles in the x-z plane.
struct ChshAngles {
    double theta = 0.0;
    double theta_prime = kPi / 2.0;
    double phi = kPi / 4.0;
    double phi_prime = 3.0 * kPi / 4.0;
};

struct PurificationResult {
    BellCoeffs output;
    double success_prob;
};

/// Werner state with fidelity f: (f, (1-f)/3, (1-f)/3, (1-f)/3).
/// Throws UnphysicalWernerError for f in [0, 0.25).
BellCoeffs werner(double f);

/// One purification round suppressing X errors, then one suppressing Z
/// errors. Both are driven by the 4x4 source/target outcome tables and
/// accept arbitrary Bell-diagonal inputs.
PurificationResult purify_round1(const BellCoeffs& source, const BellCoeffs& target);
PurificationResult purify_round2(const BellCoeffs& source, const BellCoeffs& target);

/// How raw pairs are charged for a two-round pipeline. Squared applies the
/// round-one success probability to both input branches, 4/(P1^2 P2);
/// Linear charges each round once, 4/(P1 P2). Squared is the default.
enum class PairAccounting { Squared, Linear };

struct PipelineResult {
    double f_once;
    double f_twice;
    double p1;
    double p2;
    double expected_pairs; // E(F)
    BellCoeffs once;
    BellCoeffs twice;
};

/// Two identical-input purification rounds starting from werner(f).
/// Requires f in (0.25, 1].
PipelineResult two_round_pipeline(double f, PairAccounting accounting = PairAccounting::Squared);

/// Correlation E(a, b) = t_z cos(a)cos(b) + t_x sin(a)sin(b) for measurement
/// directions cos(a) z + sin(a) x on each side.
double correlation(const BellCoeffs& state, double angle_a, double angle_b);

/// CHSH statistic S = E(theta,phi) - E(theta,phi') + E(theta',phi) + E(theta',phi').
/// With the default angles this reduces to sqrt(2) (t_z + t_x).
double chsh(const BellCoeffs& state, const ChshAngles& angles = {});

enum class PipelineStage { Raw, Once, Twice };

/// Fidelity at which S(F) crosses 2 for the given pipeline stage, found by
/// bisection over (0.25, 1] to |dF| <= 1e-6.
double chsh_violation_threshold(PipelineStage stage, const ChshAngles& angles = {});

/// Generic bracketed bisection of s_of_f(F) = 2 on [lo, hi].
/// Throws NoCrossingError when both ends sit on the same side.
double chsh_crossing(const std::function<double(double)>& s_of_f, double lo, double hi);

/// A-B marginal of the three-qubit entangling attack: the hijacker entangles
/// a third qubit with Phi+, leaving (|00><00| + |11><11|)/2, which is
/// (1/2, 0, 0, 1/2) in the Bell basis.
BellCoeffs hijacked_state();

// --- tomography sample-count models -------------------------------------

struct ConstantCost {
    double pairs;
};

/// pairs = base + slope * (1 - f).
struct AffineCost {
    double base;
    double slope;
};

/// Step table: entries (f_min, pairs) sorted ascending by f_min; the entry
/// with the largest f_min <= f applies.
struct TableCost {
    std::vector<std::pair<double, double>> points;
};

using CostModel = std::variant<ConstantCost, AffineCost, TableCost>;

/// Default B(F): constant 2500 pairs, the midpoint of the 2000-3000 range
/// measured for F ~= 0.65.
CostModel default_cost_model();

/// B(F): pairs needed to verify one check at base fidelity f.
/// Requires f in (0.25, 1]; rejects models yielding non-positive counts.
double tomography_sample_count(double f, const CostModel& model = default_cost_model());

// --- curve emission ------------------------------------------------------

struct CurvePoint {
    double f;
    double f_once;
    double f_twice;
    double e_of_f;
    double s_raw;
    double s_once;
    double s_twice;
};

/// Samples the purification / CHSH curves over [f_from, f_to] inclusive.
std::vector<CurvePoint> purification_curve(double f_from, double f_to, double step,
                                           PairAccounting accounting = PairAccounting::Squared);

} // namespace qrsim
