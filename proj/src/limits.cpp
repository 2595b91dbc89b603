#include "heatbv/limits.hpp"

#include <algorithm>
#include <cmath>

#include "heatbv/errors.hpp"
#include "heatbv/special.hpp"

namespace heatbv {

const char* fit_model_name(FitModel m) {
    switch (m) {
        case FitModel::Constant: return "constant";
        case FitModel::AffineInT: return "affine-in-t";
        case FitModel::AffineInSqrtT: return "affine-in-sqrt-t";
    }
    return "?";
}

double ConvergenceCurve::rel_err() const {
    if (!target) return 0.0;
    const double denom = std::max(std::fabs(*target), 1e-300);
    return std::fabs(limit_estimate - *target) / denom;
}

std::vector<double> TLadder::times() const {
    std::vector<double> ts(k);
    for (std::size_t j = 0; j < k; ++j) ts[j] = t0 * std::pow(rho, static_cast<double>(j));
    return ts;
}

ConvergenceCurve sweep(const MetricMeasureSpace& space, const TLadder& ladder,
                       const std::function<FunctionalSample(double)>& functional,
                       const std::function<double(double)>& heat_time, bool enforce_guard) {
    if (!(ladder.t0 > 0)) throw NonPositiveTime("ladder t0 must be positive");
    if (!(ladder.rho > 0 && ladder.rho < 1)) throw Error("ladder ratio must lie in (0,1)");
    if (ladder.k < 4 || ladder.k > 64) throw Error("ladder length must lie in [4, 64]");

    const auto ts = ladder.times();
    if (enforce_guard && space.is_uniform_grid()) {
        const double t_min = ts.back();
        const double heat_min = heat_time ? heat_time(t_min) : t_min;
        const double h = space.spacing();
        if (std::sqrt(heat_min) < 10.0 * h) {
            // Minimal admissible points-per-axis at this ladder.
            const double span = space.is_closed() ? space.period()
                                                  : (space.line_b() - space.line_a());
            const std::size_t n_min = static_cast<std::size_t>(
                std::ceil(span * 10.0 / std::sqrt(heat_min)));
            throw ResolutionGuardViolated(
                "sweep needs sqrt(heat time) >= 10 h; minimal admissible resolution N = " +
                std::to_string(n_min));
        }
    }

    ConvergenceCurve curve;
    curve.samples.reserve(ts.size());
    for (double t : ts) curve.samples.push_back(functional(t));
    std::sort(curve.samples.begin(), curve.samples.end(),
              [](const FunctionalSample& a, const FunctionalSample& b) { return a.t > b.t; });
    return curve;
}

namespace {

struct Fit {
    double a = 0.0, b = 0.0;
    double residual_norm = 0.0;
    double stderr_a = 0.0;
};

/// Ordinary least squares of y against [1, g(t)], returning the intercept,
/// its covariance scaled by the residual, and the residual norm.
Fit fit_affine(const std::vector<double>& ts, const std::vector<double>& ys,
               const std::function<double(double)>& g) {
    const std::size_t n = ts.size();
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g(ts[i]);
        sx += x;
        sxx += x * x;
        sy += ys[i];
        sxy += x * ys[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sxx - sx * sx;
    if (!(std::fabs(det) > 0)) throw DegenerateFit("all abscissae coincide");
    Fit f;
    f.a = (sxx * sy - sx * sxy) / det;
    f.b = (nn * sxy - sx * sy) / det;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (f.a + f.b * g(ts[i]));
        rss += r * r;
    }
    f.residual_norm = std::sqrt(rss);
    const double dof = std::max(1.0, nn - 2.0);
    const double sigma2 = rss / dof;
    f.stderr_a = std::sqrt(sigma2 * sxx / det);
    return f;
}

}  // namespace

void extrapolate(ConvergenceCurve& curve) {
    const std::size_t k = curve.samples.size();
    if (k < 4) throw Error("extrapolation needs at least 4 samples");
    const std::size_t m = (k + 1) / 2;  // smallest ⌈k/2⌉ samples
    std::vector<double> ts, ys;
    for (std::size_t i = k - m; i < k; ++i) {
        ts.push_back(curve.samples[i].t);
        ys.push_back(curve.samples[i].value);
    }
    bool distinct = false;
    for (std::size_t i = 1; i < ts.size(); ++i) distinct = distinct || ts[i] != ts[0];
    if (!distinct) throw DegenerateFit("all t coincide");

    double lo = ys[0], hi = ys[0];
    for (double y : ys) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    const double scale = std::max(std::fabs(lo), std::fabs(hi));
    if (hi - lo <= 1e-10 * std::max(scale, 1e-300)) {
        curve.model = FitModel::Constant;
        double mean = 0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(ys.size());
        curve.limit_estimate = mean;
        double rss = 0;
        for (double y : ys) rss += (y - mean) * (y - mean);
        curve.limit_stderr = std::sqrt(rss / std::max<double>(1, ys.size() - 1)) /
                             std::sqrt(static_cast<double>(ys.size()));
        return;
    }

    const Fit ft = fit_affine(ts, ys, [](double t) { return t; });
    const Fit fs = fit_affine(ts, ys, [](double t) { return std::sqrt(t); });
    if (ft.residual_norm <= fs.residual_norm) {
        curve.model = FitModel::AffineInT;
        curve.limit_estimate = ft.a;
        curve.limit_stderr = ft.stderr_a;
    } else {
        curve.model = FitModel::AffineInSqrtT;
        curve.limit_estimate = fs.a;
        curve.limit_stderr = fs.stderr_a;
    }
}

void apply_target(ConvergenceCurve& curve, double target, double tolerance) {
    curve.target = target;
    curve.tolerance = tolerance;
    curve.pass = curve.rel_err() <= tolerance;
}

double sobolev_constant(double p) {
    if (!(p >= 1.0)) throw Error("sobolev constant needs p >= 1");
    return std::pow(2.0, p) * lanczos_gamma(0.5 * (p + 1.0)) / kSqrtPi;
}

double target_sobolev(double p, double cheeger_p_energy) {
    return sobolev_constant(p) * cheeger_p_energy;
}

double target_bv(double total_variation) { return 2.0 * kInvSqrtPi * total_variation; }

double target_jump_pairing(const JumpData& f, const JumpData& g, double position_tol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.jump_points.size(); ++i) {
        for (std::size_t j = 0; j < g.jump_points.size(); ++j) {
            if (std::fabs(f.jump_points[i] - g.jump_points[j]) <= position_tol) {
                sum += (f.upper[i] - f.lower[i]) * (g.upper[j] - g.lower[j]) *
                       static_cast<double>(f.orientation[i] * g.orientation[j]);
            }
        }
    }
    return kInvSqrtPi * sum;
}

double target_blowup() { return 1.0 / std::sqrt(8.0 * kPi); }

}  // namespace heatbv
