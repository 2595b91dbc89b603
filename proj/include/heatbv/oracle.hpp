#pragma once

#include <cstdint>
#include <vector>

#include "heatbv/field.hpp"
#include "heatbv/space.hpp"

namespace heatbv::oracle {

enum class OracleMethod : std::uint8_t {
    ErfcClosedForm,
    Quadrature10x,
    CrossEngine,
    PairEnumeration,
};

struct OracleValue {
    double value = 0.0;
    OracleMethod method = OracleMethod::ErfcClosedForm;
    double bound = 0.0;  // guaranteed absolute error
};

/// Dedicated rational approximations (independent of the main evaluation
/// paths and of any kernel cache). Max relative error below 1e-14 on [0,10].
double erfc_rational(double x);
double erf_rational(double x);

/// ∬_{x>a, y<a} + ∬_{x<a, y>a} of p_t(x-y) on ℝ: exactly 2√(t/π), derived
/// from ∫₀^∞ ½ erfc(x/(2√t)) dx = √(t/π).
OracleValue halfline_bv_exact(double t);

/// Same quantity by numerical quadrature of the erfc integrand — used to
/// certify the closed form without sharing its algebra.
OracleValue halfline_bv_quadrature(double t, std::size_t panels = 20000);

/// ∫ |f'|^p over the field's domain: trapezoid at 10x the experiment grid,
/// Richardson-corrected against the 20x rule; bound from the step-halving
/// difference.
OracleValue quadrature_energy(const FieldSpec& f, double p, double lo, double hi,
                              std::size_t base_n, bool periodic);

/// Exhaustive O(N²) evaluation of ∬ p_t |f(x)-f(y)|^p dm dm in extended
/// precision, no distance cutoff, no compensated trick — certifies the
/// streaming/cutoff/Kahan strategies. Throws SpaceTooLarge above N = 512.
OracleValue pair_enumeration(const MetricMeasureSpace& space, const std::vector<double>& f,
                             double p, double t);

/// Exhaustive ⟨(1-h_t)f, g⟩ in extended precision (same constraints).
OracleValue pairing_enumeration(const MetricMeasureSpace& space, const std::vector<double>& f,
                                const std::vector<double>& g, double t);

}  // namespace heatbv::oracle
