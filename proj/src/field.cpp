#include "heatbv/field.hpp"

#include <algorithm>
#include <cmath>

#include "heatbv/errors.hpp"
#include "heatbv/special.hpp"

namespace heatbv {

double JumpProfile::value_at(double x) const {
    if (breakpoints.empty()) return values.empty() ? 0.0 : values[0];
    if (periodic) {
        double xr = std::fmod(x, period);
        if (xr < 0) xr += period;
        // values[k] holds on [bp[k], bp[k+1]) cyclically.
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), xr);
        if (it == breakpoints.begin() || it == breakpoints.end()) {
            // before the first breakpoint we are on the wrap-around arc
            return values.back();
        }
        return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
    }
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    return values[static_cast<std::size_t>(it - breakpoints.begin())];
}

void JumpProfile::validate() const {
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        if (!(breakpoints[k] > breakpoints[k - 1]))
            throw UnsortedBreakpoints("breakpoints must be strictly increasing");
    if (breakpoints.empty()) {
        if (values.size() != 1) throw Error("constant profile needs exactly one value");
        return;
    }
    const std::size_t expect = periodic ? breakpoints.size() : breakpoints.size() + 1;
    if (values.size() != expect) throw Error("profile value count does not match breakpoints");
    if (periodic && !(period > 0)) throw NonPositiveLength("periodic profile needs period > 0");
}

double FieldSpec::value(double x) const {
    switch (kind) {
        case Kind::Constant: return constant;
        case Kind::Linear: return slope * x + constant;
        case Kind::Sine: return amplitude * std::sin(2.0 * kPi * periods * x / domain_length);
        case Kind::PiecewiseConstant: return profile.value_at(x);
    }
    return 0.0;
}

double FieldSpec::derivative(double x) const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Linear: return slope;
        case Kind::Sine: {
            const double w = 2.0 * kPi * periods / domain_length;
            return amplitude * w * std::cos(w * x);
        }
        case Kind::PiecewiseConstant: return 0.0;
    }
    return 0.0;
}

FieldSpec FieldSpec::sine(double amplitude, double periods, double domain_length) {
    FieldSpec s;
    s.kind = Kind::Sine;
    s.amplitude = amplitude;
    s.periods = periods;
    s.domain_length = domain_length;
    return s;
}

FieldSpec FieldSpec::linear(double slope, double offset) {
    FieldSpec s;
    s.kind = Kind::Linear;
    s.slope = slope;
    s.constant = offset;
    return s;
}

FieldSpec FieldSpec::constant_field(double c) {
    FieldSpec s;
    s.kind = Kind::Constant;
    s.constant = c;
    return s;
}

FieldSpec FieldSpec::piecewise(JumpProfile profile) {
    profile.validate();
    FieldSpec s;
    s.kind = Kind::PiecewiseConstant;
    s.profile = std::move(profile);
    return s;
}

ScalarField IndicatorSet::as_field() const {
    ScalarField f;
    f.values.assign(membership.begin(), membership.end());
    if (boundary) {
        f.profile = *boundary;
        f.spec = FieldSpec::piecewise(*boundary);
    }
    return f;
}

std::vector<int> IndicatorSet::orientations() const {
    if (!boundary) throw NoBoundaryOracle("indicator set carries no boundary description");
    std::vector<int> out;
    out.reserve(boundary->breakpoints.size());
    for (std::size_t k = 0; k < boundary->breakpoints.size(); ++k)
        out.push_back(boundary->jump(k) > 0 ? +1 : -1);
    return out;
}

ScalarField sample_field(const MetricMeasureSpace& space, const FieldSpec& spec) {
    if (space.dim() != 1)
        throw UnsupportedGeometry("closed-form fields are sampled on 1-D geometries");
    ScalarField f;
    const std::size_t n = space.size();
    f.values.resize(n);
    std::vector<double> deriv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = space.position(i);
        f.values[i] = spec.value(x);
        deriv[i] = std::fabs(spec.derivative(x));
    }
    f.derivative_oracle = std::move(deriv);
    if (spec.kind == FieldSpec::Kind::PiecewiseConstant) f.profile = spec.profile;
    f.spec = spec;
    return f;
}

namespace {

IndicatorSet from_profile(const MetricMeasureSpace& space, JumpProfile profile) {
    profile.validate();
    IndicatorSet e;
    const std::size_t n = space.size();
    e.membership.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        e.membership[i] = profile.value_at(space.position(i)) >= 0.5 ? 1 : 0;
    e.exact_perimeter = static_cast<double>(profile.breakpoints.size());
    // Sanity on 1-D indicator structure: orientations alternate, closed
    // geometries carry an even number of jumps.
    if (profile.periodic && profile.breakpoints.size() % 2 != 0)
        throw Error("circle indicator must have an even number of jumps");
    for (std::size_t k = 1; k < profile.breakpoints.size(); ++k) {
        const bool up_prev = profile.jump(k - 1) > 0;
        const bool up_here = profile.jump(k) > 0;
        if (up_prev == up_here) throw Error("indicator orientations must alternate");
    }
    e.boundary = std::move(profile);
    return e;
}

}  // namespace

IndicatorSet indicator_halfline(const MetricMeasureSpace& space, double a) {
    if (space.kind() != GeometryKind::LineGrid)
        throw UnsupportedGeometry("half-line indicator needs a line grid");
    JumpProfile p;
    p.breakpoints = {a};
    p.values = {0.0, 1.0};
    return from_profile(space, std::move(p));
}

IndicatorSet indicator_intervals(const MetricMeasureSpace& space,
                                 const std::vector<std::pair<double, double>>& intervals) {
    if (space.dim() != 1 || space.kind() == GeometryKind::WeightedGraph)
        throw UnsupportedGeometry("interval indicator needs a 1-D grid");
    JumpProfile p;
    p.periodic = space.is_closed();
    p.period = space.period();
    for (const auto& [a, b] : intervals) {
        if (!(b > a)) throw NonPositiveLength("interval must have positive length");
        p.breakpoints.push_back(a);
        p.breakpoints.push_back(b);
    }
    if (!std::is_sorted(p.breakpoints.begin(), p.breakpoints.end()))
        throw UnsortedBreakpoints("intervals must be disjoint and sorted");
    if (p.periodic) {
        // values[k] on [bp[k], bp[k+1]): in, out, in, out, ...
        for (std::size_t k = 0; k < p.breakpoints.size(); ++k)
            p.values.push_back(k % 2 == 0 ? 1.0 : 0.0);
    } else {
        p.values.push_back(0.0);
        for (std::size_t k = 0; k < p.breakpoints.size(); ++k)
            p.values.push_back(k % 2 == 0 ? 1.0 : 0.0);
    }
    return from_profile(space, std::move(p));
}

IndicatorSet indicator_torus_rectangle(const MetricMeasureSpace& space, double x0, double x1,
                                       double y0, double y1) {
    if (space.kind() != GeometryKind::TorusGrid)
        throw UnsupportedGeometry("rectangle indicator needs a torus grid");
    IndicatorSet e;
    const std::size_t n = space.size();
    e.membership.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = space.point(i);
        e.membership[i] = (p[0] >= x0 && p[0] < x1 && p[1] >= y0 && p[1] < y1) ? 1 : 0;
    }
    e.exact_perimeter = 2.0 * (x1 - x0) + 2.0 * (y1 - y0);
    return e;
}

IndicatorSet indicator_all(const MetricMeasureSpace& space) {
    IndicatorSet e;
    e.membership.assign(space.size(), 1);
    JumpProfile p;
    p.periodic = space.is_closed();
    p.period = space.period();
    p.values = {1.0};
    e.boundary = std::move(p);
    e.exact_perimeter = 0.0;
    return e;
}

namespace {

JumpProfile combine(const JumpProfile& a, const JumpProfile& b,
                    const std::function<double(double, double)>& op) {
    JumpProfile out;
    out.periodic = a.periodic;
    out.period = a.period;
    std::vector<double> bps;
    bps.insert(bps.end(), a.breakpoints.begin(), a.breakpoints.end());
    bps.insert(bps.end(), b.breakpoints.begin(), b.breakpoints.end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    if (bps.empty()) {
        out.values = {op(a.value_at(0.0), b.value_at(0.0))};
        return out;
    }
    std::vector<double> vals;
    if (out.periodic) {
        for (std::size_t k = 0; k < bps.size(); ++k) {
            const double hi = (k + 1 < bps.size()) ? bps[k + 1] : bps[0] + out.period;
            const double mid = 0.5 * (bps[k] + hi);
            vals.push_back(op(a.value_at(mid), b.value_at(mid)));
        }
    } else {
        vals.push_back(op(a.value_at(bps.front() - 1.0), b.value_at(bps.front() - 1.0)));
        for (std::size_t k = 0; k < bps.size(); ++k) {
            const double hi = (k + 1 < bps.size()) ? bps[k + 1] : bps[k] + 2.0;
            const double mid = 0.5 * (bps[k] + hi);
            vals.push_back(op(a.value_at(mid), b.value_at(mid)));
        }
    }
    // Drop breakpoints with no jump.
    JumpProfile squeezed;
    squeezed.periodic = out.periodic;
    squeezed.period = out.period;
    if (out.periodic) {
        const std::size_t m = bps.size();
        for (std::size_t k = 0; k < m; ++k) {
            if (vals[k] != vals[(k + m - 1) % m]) {
                squeezed.breakpoints.push_back(bps[k]);
                squeezed.values.push_back(vals[k]);
            }
        }
        if (squeezed.breakpoints.empty()) squeezed.values = {vals.front()};
    } else {
        squeezed.values.push_back(vals.front());
        for (std::size_t k = 0; k < bps.size(); ++k) {
            if (vals[k + 1] != squeezed.values.back()) {
                squeezed.breakpoints.push_back(bps[k]);
                squeezed.values.push_back(vals[k + 1]);
            }
        }
    }
    return squeezed;
}

IndicatorSet combine_sets(const MetricMeasureSpace& space, const IndicatorSet& e,
                          const IndicatorSet& f, const std::function<double(double, double)>& op) {
    IndicatorSet out;
    const std::size_t n = space.size();
    out.membership.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.membership[i] =
            op(static_cast<double>(e.membership[i]), static_cast<double>(f.membership[i])) >= 0.5
                ? 1
                : 0;
    if (e.boundary && f.boundary) {
        JumpProfile p = combine(*e.boundary, *f.boundary, op);
        out.exact_perimeter = static_cast<double>(p.breakpoints.size());
        out.boundary = std::move(p);
    }
    return out;
}

}  // namespace

IndicatorSet complement(const MetricMeasureSpace& space, const IndicatorSet& e) {
    IndicatorSet one = indicator_all(space);
    return combine_sets(space, one, e, [](double a, double b) { return a - b; });
}

IndicatorSet set_union(const MetricMeasureSpace& space, const IndicatorSet& e, const IndicatorSet& f) {
    return combine_sets(space, e, f, [](double a, double b) { return std::max(a, b); });
}

IndicatorSet set_intersection(const MetricMeasureSpace& space, const IndicatorSet& e,
                              const IndicatorSet& f) {
    return combine_sets(space, e, f, [](double a, double b) { return std::min(a, b); });
}

IndicatorSet set_difference(const MetricMeasureSpace& space, const IndicatorSet& e,
                            const IndicatorSet& f) {
    return combine_sets(space, e, f, [](double a, double b) { return std::max(a - b, 0.0); });
}

}  // namespace heatbv
