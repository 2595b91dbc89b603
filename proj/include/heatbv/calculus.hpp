#pragma once

#include <cstdint>
#include <vector>

#include "heatbv/field.hpp"
#include "heatbv/space.hpp"

namespace heatbv {

enum class EnergyMethod : std::uint8_t { Oracle, DiscreteSlope, Coarea };

struct EnergyReport {
    double p = 2.0;
    double value = 0.0;
    EnergyMethod method = EnergyMethod::Oracle;
};

/// ∫ |f'|^p dm. Oracle method integrates the derivative oracle by the
/// trapezoid rule on the grid; discrete-slope uses symmetric difference
/// quotients (wraparound on closed geometries); coarea (p = 1) sweeps level
/// sets. Throws NoDerivativeSource when no route applies.
EnergyReport cheeger_energy(const MetricMeasureSpace& space, const ScalarField& f, double p,
                            EnergyMethod method = EnergyMethod::Oracle);

/// Total variation |Df|(X) of a 1-D field: sum of |jumps| for
/// piecewise-constant fields, Σ|f_{i+1}-f_i| for sampled fields
/// (wraparound when closed). Throws UnsupportedGeometry in dimension ≥ 2.
EnergyReport total_variation(const MetricMeasureSpace& space, const ScalarField& f);

/// Coarea route: ∫ perimeter({f > s}) ds by level sweeping. Exact finite sum
/// for piecewise-constant fields; uniform level grid otherwise.
EnergyReport total_variation_coarea(const MetricMeasureSpace& space, const ScalarField& f,
                                    std::size_t levels = 10000);

/// Perimeter |Dχ_E|(X): jump count in 1-D (from the boundary description),
/// boundary edge length for cell unions on a 2-D torus.
double perimeter(const MetricMeasureSpace& space, const IndicatorSet& e);

/// Fine 1-D jump quantities of a piecewise-constant field.
struct JumpData {
    std::vector<double> jump_points;  // sorted
    std::vector<double> lower;        // f^∧
    std::vector<double> upper;        // f^∨
    std::vector<int> orientation;     // sign of (right value - left value)

    double total_variation() const {
        double s = 0.0;
        for (std::size_t k = 0; k < jump_points.size(); ++k) s += upper[k] - lower[k];
        return s;
    }
};

/// f^∧ / f^∨ / orientations at the breakpoints of a piecewise-constant field.
/// Throws UnsortedBreakpoints (via profile validation) and NoBoundaryOracle
/// when the field carries no exact profile.
JumpData jump_data(const ScalarField& f);
JumpData jump_data(const JumpProfile& profile);

/// Discrete symmetric-difference slope |f_{i+1}-f_{i-1}|/2h per point
/// (wraparound on closed geometries, one-sided at open ends).
std::vector<double> discrete_slope(const MetricMeasureSpace& space, const std::vector<double>& f);

}  // namespace heatbv
