#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "heatbv/space.hpp"

namespace heatbv {

/// Exact description of a 1-D piecewise-constant function.
/// On a line: values[k] holds on (breakpoints[k-1], breakpoints[k]), with
/// values.front() before the first breakpoint and values.back() after the
/// last, so values.size() == breakpoints.size() + 1.
/// On a circle of length L: values[k] holds on [breakpoints[k], breakpoints[k+1])
/// cyclically, so values.size() == breakpoints.size().
struct JumpProfile {
    std::vector<double> breakpoints;  // strictly increasing
    std::vector<double> values;
    bool periodic = false;
    double period = 0.0;  // circle length when periodic

    /// Signed jump at breakpoint k: value after minus value before.
    double jump(std::size_t k) const {
        if (periodic) {
            const std::size_t m = breakpoints.size();
            return values[k] - values[(k + m - 1) % m];
        }
        return values[k + 1] - values[k];
    }

    double value_at(double x) const;
    void validate() const;  // throws UnsortedBreakpoints
};

/// Closed-form field descriptors; evaluable anywhere, with exact derivatives.
/// Used by the oracle quadrature (which samples at 10x the grid) and by the
/// experiment config.
struct FieldSpec {
    enum class Kind : std::uint8_t { Constant, Linear, Sine, PiecewiseConstant };
    Kind kind = Kind::Constant;
    double amplitude = 1.0;
    double periods = 1.0;     // Sine: f = A sin(2π·periods·x/L)
    double domain_length = 1.0;
    double constant = 0.0;
    double slope = 1.0;       // Linear: f = slope·x + constant
    JumpProfile profile;      // PiecewiseConstant

    double value(double x) const;
    double derivative(double x) const;  // 0 for piecewise-constant off breakpoints

    static FieldSpec sine(double amplitude, double periods, double domain_length);
    static FieldSpec linear(double slope, double offset = 0.0);
    static FieldSpec constant_field(double c);
    static FieldSpec piecewise(JumpProfile profile);
};

/// Real values sampled on the points of a space, optionally paired with a
/// nonnegative slope oracle |f'| and/or an exact jump profile.
struct ScalarField {
    std::vector<double> values;
    std::optional<std::vector<double>> derivative_oracle;  // |f'| per point
    std::optional<JumpProfile> profile;                    // exact pc structure
    std::optional<FieldSpec> spec;                         // closed form, if any

    double sup_norm() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }
};

/// Boolean membership per point with optional exact boundary description.
struct IndicatorSet {
    std::vector<std::uint8_t> membership;
    std::optional<JumpProfile> boundary;  // 0/1-valued profile (1-D geometries)
    std::optional<double> exact_perimeter;

    ScalarField as_field() const;
    /// Jump orientations (+1 entering, -1 leaving), 1-D only.
    std::vector<int> orientations() const;
};

/// Sample a closed-form spec on a space (1-D geometries).
ScalarField sample_field(const MetricMeasureSpace& space, const FieldSpec& spec);

/// χ of [a,∞) on a line grid.
IndicatorSet indicator_halfline(const MetricMeasureSpace& space, double a);

/// χ of ∪[a_i, b_i) on a line or circle grid; arcs must be disjoint and sorted.
IndicatorSet indicator_intervals(const MetricMeasureSpace& space,
                                 const std::vector<std::pair<double, double>>& intervals);

/// Axis-aligned cell-union rectangle [x0,x1)×[y0,y1) on a 2-D torus grid.
IndicatorSet indicator_torus_rectangle(const MetricMeasureSpace& space, double x0, double x1,
                                       double y0, double y1);

/// Full space.
IndicatorSet indicator_all(const MetricMeasureSpace& space);

/// Complement (flips membership; boundary jumps keep locations, flip values).
IndicatorSet complement(const MetricMeasureSpace& space, const IndicatorSet& e);

/// Union/intersection/difference of sets on the same space (membership-wise;
/// boundary profiles recomputed when both operands carry 0/1 profiles).
IndicatorSet set_union(const MetricMeasureSpace& space, const IndicatorSet& e, const IndicatorSet& f);
IndicatorSet set_intersection(const MetricMeasureSpace& space, const IndicatorSet& e, const IndicatorSet& f);
IndicatorSet set_difference(const MetricMeasureSpace& space, const IndicatorSet& e, const IndicatorSet& f);

}  // namespace heatbv
