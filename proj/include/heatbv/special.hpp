#pragma once

#include <cmath>
#include <numbers>

namespace heatbv {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.7724538509055160273;   // √π
inline constexpr double kInvSqrtPi = 0.5641895835477562869; // 1/√π

/// Gamma via the Lanczos rational approximation (g = 7, 9 terms).
/// Relative error is below 1e-13 on [1,6], which is what the target
/// constants K_p need; reflection extends it to (0,1).
double lanczos_gamma(double x);

/// Heat kernel on ℝⁿ in the e^{-d²/4t} normalization: (4πt)^{-n/2} e^{-d²/4t}.
inline double gauss_kernel(double t, double d, int dim = 1) {
    return std::pow(4.0 * kPi * t, -0.5 * dim) * std::exp(-d * d / (4.0 * t));
}

/// ∫_z^∞ erfc(u) du = e^{-z²}/√π - z·erfc(z), for z ≥ 0.
inline double ierfc(double z) {
    return std::exp(-z * z) * kInvSqrtPi - z * std::erfc(z);
}

/// Exact heat pairing weight of two unit jumps at distance c on ℝ:
///   W_t(c) = ∫ (χ_{[a,∞)} - h_t χ_{[a,∞)}) χ_{[a+c,∞)} dx
///          = √(t/π) e^{-c²/4t} - (c/2) erfc(c/(2√t)).
/// ⟨(1-h_t)f, g⟩ = Σ_k Σ_l Δf_k Δg_l W_t(|a_k - b_l|) for piecewise-constant
/// f, g with signed jumps Δ at breakpoints a, b.
inline double jump_pair_weight(double t, double c) {
    c = std::fabs(c);
    return std::sqrt(t) * ierfc(c / (2.0 * std::sqrt(t)));
}

/// Exact flow of a unit step: h_t χ_{[a,∞)}(x) = (1/2) erfc((a-x)/(2√t)).
inline double step_heat_flow(double t, double x_minus_a) {
    return 0.5 * std::erfc(-x_minus_a / (2.0 * std::sqrt(t)));
}

/// ∫_a^b p_s(x-y) p_u(y-c) dy in closed form (Gaussian product rule).
/// With variances v1 = 2s, v2 = 2u the product is p_{s+u}(x-c) times a
/// normal density in y with mean μ = (v2·x + v1·c)/(v1+v2) and variance
/// v1·v2/(v1+v2).
inline double gauss_product_segment(double s, double u, double x, double c,
                                    double a, double b) {
    const double v1 = 2.0 * s, v2 = 2.0 * u;
    const double mu = (v2 * x + v1 * c) / (v1 + v2);
    const double var = v1 * v2 / (v1 + v2);
    const double dens = gauss_kernel(s + u, x - c);
    const double sd = std::sqrt(var);
    const double lo = (a - mu) / (sd * std::numbers::sqrt2);
    const double hi = (b - mu) / (sd * std::numbers::sqrt2);
    return dens * 0.5 * (std::erf(hi) - std::erf(lo));
}

}  // namespace heatbv
