#pragma once

#include <cstdint>
#include <optional>

#include "heatbv/field.hpp"
#include "heatbv/heat.hpp"
#include "heatbv/space.hpp"

namespace heatbv {

enum class Path : std::uint8_t { DoubleSum, HeatApply, GradientPairing, LaplacianPairing };

const char* path_name(Path p);

struct FunctionalSample {
    double t = 0.0;
    double value = 0.0;
    Path path = Path::DoubleSum;
    bool analytic = false;  // closed-form continuum evaluation (flat engine + exact jumps)
    double seconds = 0.0;
    std::uint64_t pairs = 0;
};

struct EvalOptions {
    /// Window margin factor on line grids: margin = factor · √(t_max).
    double window_margin_factor = 6.0;
    /// Largest t of the enclosing sweep; 0 means "this sample's own t".
    double t_max_hint = 0.0;
    /// Pair budget for the double sum when streaming is disabled.
    std::uint64_t pair_budget = std::uint64_t(1) << 36;
    bool streaming = true;
    /// Prefer closed-form evaluation when the engine is flat and the field
    /// carries exact jump data.
    bool prefer_analytic = true;
};

/// t^{-p/2} ∬ p_t(x,y) |f(x)-f(y)|^p dm dm  (double-sum path).
FunctionalSample sobolev_functional(const HeatKernelEngine& engine, const ScalarField& f, double p,
                                    double t, const EvalOptions& opts = {});

/// t^{-1/2} ∬ p_t(x,y) |f(x)-f(y)| dm dm. Fields with exact jump profiles on
/// flat engines evaluate in closed form (layer cake over the profile levels).
FunctionalSample bv_functional(const HeatKernelEngine& engine, const ScalarField& f, double t,
                               const EvalOptions& opts = {});

/// ∬ p_t |χ_E(x)-χ_E(y)| dm dm, recorded through both routes:
/// heat-apply 2Σ(χ_E - h_t χ_E)χ_E w and the direct double sum.
struct SetFunctionalResult {
    FunctionalSample heat_apply;
    FunctionalSample double_sum;
};
SetFunctionalResult set_functional(const HeatKernelEngine& engine, const IndicatorSet& e, double t,
                                   const EvalOptions& opts = {});

/// (1/√t) ∫ (f - h_t f) g dm.
FunctionalSample jump_functional(const HeatKernelEngine& engine, const ScalarField& f,
                                 const ScalarField& g, double t, const EvalOptions& opts = {});

/// g_t(E,F) = √8 · t · ∫ ∇h_{t²}χ_E · ∇h_{t²}χ_F dm.
/// Gradient pairing differentiates the discretely applied flow by symmetric
/// differences; Laplacian pairing uses the spectral form
/// √8 t Σ λ_i e^{-2λ_i t²} ⟨χ_E,φ_i⟩⟨χ_F,φ_i⟩ (spectral engines).
FunctionalSample polarization_g(const HeatKernelEngine& engine, const IndicatorSet& e,
                                const IndicatorSet& f, double t,
                                Path path = Path::LaplacianPairing);

/// Korevaar–Schoen-type functional ∫ ⨏_{B_r(x)} |f(x)-f(y)|^p / r^p dm(y) dm(x).
/// Throws RadiusBelowResolution when r is below the grid spacing.
double ks_functional(const MetricMeasureSpace& space, const ScalarField& f, double p, double r);

/// t · h_{t²} |∇h_{t²} χ_E| (x). The symmetric-difference path follows the
/// grid; the analytic path (flat engines, exact jumps) composes Gaussians in
/// closed form and stays meaningful when √(t²) is below the grid spacing.
double blowup_profile(const HeatKernelEngine& engine, const IndicatorSet& e, double x, double t,
                      bool analytic = true);

/// Exact heat pairing ⟨(1-h_t)f, g⟩ of piecewise-constant profiles on flat
/// 1-D geometries: Σ_k Σ_l Δf_k Δg_l W_t(|a_k - b_l|) (+ periodic images).
double exact_pair_form(const MetricMeasureSpace& space, const JumpProfile& f, const JumpProfile& g,
                       double t);

/// True when the engine/field combination supports closed-form evaluation.
bool supports_analytic(const HeatKernelEngine& engine, const ScalarField& f);

}  // namespace heatbv
