#include "heatbv/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "heatbv/errors.hpp"
#include "heatbv/sum.hpp"

namespace heatbv {

std::vector<double> discrete_slope(const MetricMeasureSpace& space, const std::vector<double>& f) {
    if (space.dim() != 1 || !space.is_uniform_grid())
        throw NoDerivativeSource("discrete slopes need a 1-D uniform grid");
    const std::size_t n = f.size();
    const double h = space.spacing();
    std::vector<double> g(n);
    if (space.is_closed()) {
        for (std::size_t i = 0; i < n; ++i) {
            const double fp = f[(i + 1) % n], fm = f[(i + n - 1) % n];
            g[i] = std::fabs(fp - fm) / (2.0 * h);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0)
                g[i] = std::fabs(f[1] - f[0]) / h;
            else if (i == n - 1)
                g[i] = std::fabs(f[n - 1] - f[n - 2]) / h;
            else
                g[i] = std::fabs(f[i + 1] - f[i - 1]) / (2.0 * h);
        }
    }
    return g;
}

namespace {

double integrate_grid(const MetricMeasureSpace& space, const std::vector<double>& g) {
    // Trapezoid rule: uniform weights on closed grids, half weights at the
    // open endpoints of a line.
    KahanSum acc;
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        double w = space.weight(i);
        if (!space.is_closed() && space.kind() == GeometryKind::LineGrid && (i == 0 || i == n - 1))
            w *= 0.5;
        acc.add(g[i] * w);
    }
    return acc.value();
}

}  // namespace

EnergyReport cheeger_energy(const MetricMeasureSpace& space, const ScalarField& f, double p,
                            EnergyMethod method) {
    if (!(p >= 1.0)) throw Error("cheeger energy needs p >= 1");
    EnergyReport r;
    r.p = p;
    r.method = method;
    switch (method) {
        case EnergyMethod::Oracle: {
            if (!f.derivative_oracle)
                throw NoDerivativeSource("field carries no derivative oracle");
            std::vector<double> g(f.derivative_oracle->size());
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] = std::pow((*f.derivative_oracle)[i], p);
            r.value = integrate_grid(space, g);
            return r;
        }
        case EnergyMethod::DiscreteSlope: {
            auto g = discrete_slope(space, f.values);
            for (auto& v : g) v = std::pow(v, p);
            r.value = integrate_grid(space, g);
            return r;
        }
        case EnergyMethod::Coarea: {
            if (p != 1.0) throw NoDerivativeSource("coarea energy route is p = 1 only");
            r.value = total_variation_coarea(space, f).value;
            return r;
        }
    }
    throw NoDerivativeSource("no derivative source for the requested method");
}

EnergyReport total_variation(const MetricMeasureSpace& space, const ScalarField& f) {
    if (space.dim() != 1 || !space.is_uniform_grid())
        throw UnsupportedGeometry("exact total variation is 1-D only");
    EnergyReport r;
    r.p = 1.0;
    if (f.profile) {
        r.method = EnergyMethod::Oracle;
        KahanSum acc;
        for (std::size_t k = 0; k < f.profile->breakpoints.size(); ++k)
            acc.add(std::fabs(f.profile->jump(k)));
        r.value = acc.value();
        return r;
    }
    r.method = EnergyMethod::DiscreteSlope;
    const std::size_t n = f.values.size();
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < n; ++i) acc.add(std::fabs(f.values[i + 1] - f.values[i]));
    if (space.is_closed()) acc.add(std::fabs(f.values[0] - f.values[n - 1]));
    r.value = acc.value();
    return r;
}

EnergyReport total_variation_coarea(const MetricMeasureSpace& space, const ScalarField& f,
                                    std::size_t levels) {
    if (space.dim() != 1 || !space.is_uniform_grid())
        throw UnsupportedGeometry("coarea sweep is 1-D only");
    EnergyReport r;
    r.p = 1.0;
    r.method = EnergyMethod::Coarea;

    if (f.profile) {
        // Finite sum over the distinct values: perimeter of {f > s} is the
        // number of essential crossings, constant between consecutive values.
        std::vector<double> vals = f.profile->values;
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        KahanSum acc;
        for (std::size_t b = 0; b + 1 < vals.size(); ++b) {
            const double s = 0.5 * (vals[b] + vals[b + 1]);
            std::size_t crossings = 0;
            const auto& prof = *f.profile;
            for (std::size_t k = 0; k < prof.breakpoints.size(); ++k) {
                const std::size_t m = prof.breakpoints.size();
                const double before =
                    prof.periodic ? prof.values[(k + m - 1) % m] : prof.values[k];
                const double after = prof.periodic ? prof.values[k] : prof.values[k + 1];
                if ((before > s) != (after > s)) ++crossings;
            }
            acc.add(static_cast<double>(crossings) * (vals[b + 1] - vals[b]));
        }
        r.value = acc.value();
        return r;
    }

    // Uniform level sweep between min and max of the sampled values.
    const auto [mn_it, mx_it] = std::minmax_element(f.values.begin(), f.values.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) {
        r.value = 0.0;
        return r;
    }
    const double ds = (mx - mn) / static_cast<double>(levels);
    const std::size_t n = f.values.size();
    KahanSum acc;
    for (std::size_t l = 0; l < levels; ++l) {
        const double s = mn + (static_cast<double>(l) + 0.5) * ds;
        std::size_t crossings = 0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if ((f.values[i] > s) != (f.values[i + 1] > s)) ++crossings;
        if (space.is_closed() && (f.values[n - 1] > s) != (f.values[0] > s)) ++crossings;
        acc.add(static_cast<double>(crossings) * ds);
    }
    r.value = acc.value();
    return r;
}

double perimeter(const MetricMeasureSpace& space, const IndicatorSet& e) {
    if (space.kind() == GeometryKind::TorusGrid) {
        // Boundary edge counting on the cell grid, × cell side.
        const std::size_t n = space.axis_resolution();
        const double h = space.spacing();
        std::size_t edges = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint8_t c = e.membership[i * n + j];
                if (c != e.membership[((i + 1) % n) * n + j]) ++edges;
                if (c != e.membership[i * n + (j + 1) % n]) ++edges;
            }
        }
        return static_cast<double>(edges) * h;
    }
    if (!e.boundary) throw NoBoundaryOracle("indicator set carries no boundary description");
    return static_cast<double>(e.boundary->breakpoints.size());
}

JumpData jump_data(const JumpProfile& profile) {
    profile.validate();
    JumpData d;
    const std::size_t m = profile.breakpoints.size();
    d.jump_points.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double before = profile.periodic ? profile.values[(k + m - 1) % m] : profile.values[k];
        const double after = profile.periodic ? profile.values[k] : profile.values[k + 1];
        if (before == after) continue;
        d.jump_points.push_back(profile.breakpoints[k]);
        d.lower.push_back(std::min(before, after));
        d.upper.push_back(std::max(before, after));
        d.orientation.push_back(after > before ? +1 : -1);
    }
    return d;
}

JumpData jump_data(const ScalarField& f) {
    if (!f.profile)
        throw NoBoundaryOracle("jump data needs a field declared piecewise-constant");
    return jump_data(*f.profile);
}

}  // namespace heatbv
