#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heatbv/calculus.hpp"
#include "heatbv/functionals.hpp"

namespace heatbv {

enum class FitModel : std::uint8_t { Constant, AffineInT, AffineInSqrtT };

const char* fit_model_name(FitModel m);

/// t-sweep of a functional plus its extrapolated t→0 limit.
struct ConvergenceCurve {
    std::vector<FunctionalSample> samples;  // sorted by descending t
    FitModel model = FitModel::Constant;
    double limit_estimate = 0.0;
    double limit_stderr = 0.0;
    std::optional<double> target;
    double tolerance = 0.0;
    bool pass = false;

    double rel_err() const;
};

struct TLadder {
    double t0 = 1e-2;
    double rho = 0.5;
    std::size_t k = 6;

    std::vector<double> times() const;
};

/// Evaluate `functional` on the geometric ladder t_j = t0·ρ^j. The guard
/// requires √(heat time) ≥ 10·grid spacing at the smallest t;
/// `heat_time` maps ladder t to the actual diffusion time (t, or t² for the
/// squared-time functionals). Throws ResolutionGuardViolated with the minimal
/// admissible resolution in the message.
ConvergenceCurve sweep(const MetricMeasureSpace& space, const TLadder& ladder,
                       const std::function<FunctionalSample(double)>& functional,
                       const std::function<double(double)>& heat_time = nullptr,
                       bool enforce_guard = true);

/// Least-squares fit of the smallest ⌈k/2⌉ samples against a + b·t and
/// a + b·√t; picks the smaller residual norm. A constant model is selected
/// when the sample range is below 1e-10 relative. Fills limit_estimate,
/// limit_stderr (covariance of a scaled by residual) and model.
void extrapolate(ConvergenceCurve& curve);

/// Attach a target and tolerance, set the verdict.
void apply_target(ConvergenceCurve& curve, double target, double tolerance);

/// --- theoretical targets ---------------------------------------------------

/// K_p = 2^p Γ((p+1)/2) / √π  (Sobolev limit constant).
double sobolev_constant(double p);

/// Targets of the t→0 limits: K_p·Ch_p(f), (2/√π)|Df|(X),
/// (1/√π)·Σ_{shared jumps}(f^∨-f^∧)(g^∨-g^∧)·(orientation product), 1/√(8π).
double target_sobolev(double p, double cheeger_p_energy);
double target_bv(double total_variation);
double target_jump_pairing(const JumpData& f, const JumpData& g, double position_tol = 1e-9);
double target_blowup();

}  // namespace heatbv
