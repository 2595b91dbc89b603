#include "heatbv/functionals.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "heatbv/errors.hpp"
#include "heatbv/parallel.hpp"
#include "heatbv/special.hpp"
#include "heatbv/sum.hpp"

namespace heatbv {

const char* path_name(Path p) {
    switch (p) {
        case Path::DoubleSum: return "double-sum";
        case Path::HeatApply: return "heat-apply";
        case Path::GradientPairing: return "gradient-pairing";
        case Path::LaplacianPairing: return "laplacian-pairing";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double window_margin(const EvalOptions& opts, double t) {
    return opts.window_margin_factor * std::sqrt(std::max(t, opts.t_max_hint));
}

/// |a-b|^p with the cheap exponents inlined.
inline double pow_abs(double d, double p) {
    d = std::fabs(d);
    if (p == 2.0) return d * d;
    if (p == 1.0) return d;
    return std::pow(d, p);
}

/// Core pair sum Σ_{x,y} κ(d(x,y)) |f(x)-f(y)|^p w_x w_y over a 1-D uniform
/// grid, outer index restricted to [xlo, xhi). Compensated accumulation with
/// deterministic fixed-chunk reduction.
struct PairSum {
    double value = 0.0;
    std::uint64_t pairs = 0;
};

PairSum pair_sum_grid(const HeatKernelEngine& engine, const std::vector<double>& f, double p,
                      double t, std::size_t xlo, std::size_t xhi) {
    const auto& s = engine.space();
    const auto kp = engine.offset_kernel(t);
    const auto& k = *kp;
    const std::size_t n = s.size();
    const double h = s.spacing();
    const double w2 = h * h;
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t omax = static_cast<std::ptrdiff_t>(k.max_offset);
    const bool wrap = k.periodic;
    const bool full_wrap = wrap && 2 * omax + 1 >= nn;

    const std::size_t count = xhi - xlo;
    std::vector<KahanSum> partials(num_chunks(count));
    std::vector<std::uint64_t> pair_counts(num_chunks(count), 0);
    parallel_for_chunks(count, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        KahanSum acc;
        std::uint64_t np = 0;
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(ii + xlo);
            const double fi = f[static_cast<std::size_t>(i)];
            if (full_wrap) {
                for (std::ptrdiff_t j = 0; j < nn; ++j) {
                    std::ptrdiff_t o = std::abs(i - j);
                    o = std::min(o, nn - o);
                    const double d = pow_abs(fi - f[static_cast<std::size_t>(j)], p);
                    acc.add(k.kappa[static_cast<std::size_t>(o)] * d);
                    ++np;
                }
            } else if (wrap) {
                for (std::ptrdiff_t o = -omax; o <= omax; ++o) {
                    std::ptrdiff_t j = (i + o) % nn;
                    if (j < 0) j += nn;
                    const double d = pow_abs(fi - f[static_cast<std::size_t>(j)], p);
                    acc.add(k.kappa[static_cast<std::size_t>(std::abs(o))] * d);
                    ++np;
                }
            } else {
                const std::ptrdiff_t jlo = std::max<std::ptrdiff_t>(0, i - omax);
                const std::ptrdiff_t jhi = std::min(nn - 1, i + omax);
                for (std::ptrdiff_t j = jlo; j <= jhi; ++j) {
                    const double d = pow_abs(fi - f[static_cast<std::size_t>(j)], p);
                    acc.add(k.kappa[static_cast<std::size_t>(std::abs(i - j))] * d);
                    ++np;
                }
            }
        }
        partials[c] = acc;
        pair_counts[c] = np;
    });
    PairSum out;
    out.value = reduce_in_order(partials) * w2;
    for (auto c : pair_counts) out.pairs += c;
    return out;
}

/// Generic O(N²) pair sum for graphs (dense distances, no offset structure).
PairSum pair_sum_generic(const HeatKernelEngine& engine, const std::vector<double>& f, double p,
                         double t) {
    const auto& s = engine.space();
    const std::size_t n = s.size();
    std::vector<KahanSum> partials(num_chunks(n));
    std::vector<std::uint64_t> pair_counts(num_chunks(n), 0);
    parallel_for_chunks(n, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        KahanSum acc;
        std::uint64_t np = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                acc.add(engine.kernel(t, i, j) * pow_abs(f[i] - f[j], p) * s.weight(i) *
                        s.weight(j));
                ++np;
            }
        }
        partials[c] = acc;
        pair_counts[c] = np;
    });
    PairSum out;
    out.value = reduce_in_order(partials);
    for (auto c : pair_counts) out.pairs += c;
    return out;
}

PairSum raw_pair_functional(const HeatKernelEngine& engine, const std::vector<double>& f, double p,
                            double t, const EvalOptions& opts) {
    const auto& s = engine.space();
    if (!opts.streaming) {
        const auto n2 = static_cast<std::uint64_t>(s.size()) * s.size();
        if (n2 > opts.pair_budget)
            throw PairBudgetExceeded("N² exceeds the pair budget and streaming is disabled");
    }
    if (s.is_uniform_grid() && s.dim() == 1) {
        auto [lo, hi] = s.window_indices(window_margin(opts, t));
        return pair_sum_grid(engine, f, p, t, lo, hi);
    }
    return pair_sum_generic(engine, f, p, t);
}

/// Distinct-level bands of a piecewise-constant profile, as 0/1 level-set
/// profiles paired with band widths.
std::vector<std::pair<JumpProfile, double>> level_bands(const JumpProfile& prof) {
    std::vector<double> vals = prof.values;
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<std::pair<JumpProfile, double>> bands;
    for (std::size_t b = 0; b + 1 < vals.size(); ++b) {
        const double sthr = 0.5 * (vals[b] + vals[b + 1]);
        JumpProfile lev;
        lev.periodic = prof.periodic;
        lev.period = prof.period;
        const std::size_t m = prof.breakpoints.size();
        std::vector<double> raw_vals;
        for (std::size_t k = 0; k < m; ++k) {
            const double after = prof.periodic ? prof.values[k] : prof.values[k + 1];
            raw_vals.push_back(after > sthr ? 1.0 : 0.0);
        }
        // keep only true crossings
        for (std::size_t k = 0; k < m; ++k) {
            const double before =
                prof.periodic ? raw_vals[(k + m - 1) % m]
                              : (k == 0 ? (prof.values[0] > sthr ? 1.0 : 0.0) : raw_vals[k - 1]);
            if (raw_vals[k] != before) {
                lev.breakpoints.push_back(prof.breakpoints[k]);
                if (lev.periodic) lev.values.push_back(raw_vals[k]);
            }
        }
        if (!lev.periodic) {
            lev.values.push_back(prof.values[0] > sthr ? 1.0 : 0.0);
            double cur = lev.values[0];
            for (std::size_t k = 0; k < lev.breakpoints.size(); ++k) {
                cur = 1.0 - cur;
                lev.values.push_back(cur);
            }
        } else if (lev.breakpoints.empty()) {
            lev.values = {vals.back() > sthr ? 1.0 : 0.0};
        }
        bands.emplace_back(std::move(lev), vals[b + 1] - vals[b]);
    }
    return bands;
}

bool engine_is_flat_1d(const HeatKernelEngine& engine) {
    const auto kind = engine.space().kind();
    const bool geom_ok = kind == GeometryKind::LineGrid || kind == GeometryKind::CircleGrid;
    const bool backend_ok = engine.backend() == Backend::ClosedFormGaussian ||
                            engine.backend() == Backend::ImageSum;
    return geom_ok && backend_ok;
}

}  // namespace

double exact_pair_form(const MetricMeasureSpace& space, const JumpProfile& f, const JumpProfile& g,
                       double t) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    KahanSum acc;
    const std::size_t mf = f.breakpoints.size(), mg = g.breakpoints.size();
    if (space.is_closed()) {
        const double L = space.period();
        const int kimg = ImageSumEngine::truncation_order(t, L) + 1;
        for (std::size_t k = 0; k < mf; ++k) {
            const double dfk = f.jump(k);
            for (std::size_t l = 0; l < mg; ++l) {
                const double dgl = g.jump(l);
                for (int img = -kimg; img <= kimg; ++img) {
                    const double c = f.breakpoints[k] - g.breakpoints[l] +
                                     static_cast<double>(img) * L;
                    acc.add(dfk * dgl * jump_pair_weight(t, c));
                }
            }
        }
        return acc.value();
    }
    for (std::size_t k = 0; k < mf; ++k)
        for (std::size_t l = 0; l < mg; ++l)
            acc.add(f.jump(k) * g.jump(l) *
                    jump_pair_weight(t, f.breakpoints[k] - g.breakpoints[l]));
    return acc.value();
}

bool supports_analytic(const HeatKernelEngine& engine, const ScalarField& f) {
    return engine_is_flat_1d(engine) && f.profile.has_value();
}

FunctionalSample sobolev_functional(const HeatKernelEngine& engine, const ScalarField& f, double p,
                                    double t, const EvalOptions& opts) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    if (!(p > 1.0)) throw Error("sobolev functional needs p in (1, inf)");
    const auto t0 = Clock::now();
    auto ps = raw_pair_functional(engine, f.values, p, t, opts);
    FunctionalSample s;
    s.t = t;
    s.path = Path::DoubleSum;
    s.value = ps.value / std::pow(t, 0.5 * p);
    s.pairs = ps.pairs;
    s.seconds = elapsed(t0);
    return s;
}

FunctionalSample bv_functional(const HeatKernelEngine& engine, const ScalarField& f, double t,
                               const EvalOptions& opts) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    const auto t0 = Clock::now();
    FunctionalSample s;
    s.t = t;
    if (opts.prefer_analytic && supports_analytic(engine, f)) {
        // Layer cake over the profile's level bands; each band contributes
        // 2⟨(1-h_t)χ, χ⟩ through the exact pair form.
        KahanSum acc;
        for (const auto& [lev, gap] : level_bands(*f.profile))
            acc.add(gap * 2.0 * exact_pair_form(engine.space(), lev, lev, t));
        s.value = acc.value() / std::sqrt(t);
        s.path = Path::HeatApply;
        s.analytic = true;
        s.seconds = elapsed(t0);
        return s;
    }
    auto ps = raw_pair_functional(engine, f.values, 1.0, t, opts);
    s.value = ps.value / std::sqrt(t);
    s.path = Path::DoubleSum;
    s.pairs = ps.pairs;
    s.seconds = elapsed(t0);
    return s;
}

SetFunctionalResult set_functional(const HeatKernelEngine& engine, const IndicatorSet& e, double t,
                                   const EvalOptions& opts) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    const auto& s = engine.space();
    SetFunctionalResult out;

    {  // heat-apply route: 2 Σ (χ_E - h_t χ_E) χ_E w
        const auto t0 = Clock::now();
        std::vector<double> chi(e.membership.begin(), e.membership.end());
        const auto h = engine.apply(t, chi);
        auto [lo, hi] = s.window_indices(window_margin(opts, t));
        KahanSum acc;
        for (std::size_t i = lo; i < hi; ++i)
            if (e.membership[i]) acc.add((1.0 - h[i]) * s.weight(i));
        out.heat_apply.t = t;
        out.heat_apply.value = 2.0 * acc.value();
        out.heat_apply.path = Path::HeatApply;
        out.heat_apply.pairs = s.size();
        out.heat_apply.seconds = elapsed(t0);
    }
    {  // direct double sum
        const auto t0 = Clock::now();
        std::vector<double> chi(e.membership.begin(), e.membership.end());
        auto ps = raw_pair_functional(engine, chi, 1.0, t, opts);
        out.double_sum.t = t;
        out.double_sum.value = ps.value;
        out.double_sum.path = Path::DoubleSum;
        out.double_sum.pairs = ps.pairs;
        out.double_sum.seconds = elapsed(t0);
    }
    return out;
}

FunctionalSample jump_functional(const HeatKernelEngine& engine, const ScalarField& f,
                                 const ScalarField& g, double t, const EvalOptions& opts) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    const auto t0 = Clock::now();
    const auto& s = engine.space();
    FunctionalSample out;
    out.t = t;
    if (opts.prefer_analytic && supports_analytic(engine, f) && g.profile.has_value()) {
        out.value = exact_pair_form(s, *f.profile, *g.profile, t) / std::sqrt(t);
        out.path = Path::HeatApply;
        out.analytic = true;
        out.seconds = elapsed(t0);
        return out;
    }
    const auto hf = engine.apply(t, f.values);
    auto [lo, hi] = s.window_indices(window_margin(opts, t));
    KahanSum acc;
    for (std::size_t i = lo; i < hi; ++i)
        acc.add((f.values[i] - hf[i]) * g.values[i] * s.weight(i));
    out.value = acc.value() / std::sqrt(t);
    out.path = Path::HeatApply;
    out.pairs = s.size();
    out.seconds = elapsed(t0);
    return out;
}

FunctionalSample polarization_g(const HeatKernelEngine& engine, const IndicatorSet& e,
                                const IndicatorSet& f, double t, Path path) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    const auto t0 = Clock::now();
    const auto& s = engine.space();
    const double t2 = t * t;
    FunctionalSample out;
    out.t = t;

    if (path == Path::LaplacianPairing) {
        const auto* spectral = dynamic_cast<const SpectralEngine*>(&engine);
        if (!spectral)
            throw UnsupportedGeometry("laplacian pairing needs a spectral engine");
        std::vector<double> chi_e(e.membership.begin(), e.membership.end());
        std::vector<double> chi_f(f.membership.begin(), f.membership.end());
        const auto ce = spectral->coefficients(chi_e);
        const auto cf = spectral->coefficients(chi_f);
        KahanSum acc;
        for (std::size_t i = 0; i < ce.size(); ++i) {
            const double lam = spectral->lambda(i);
            const double w = lam * std::exp(-2.0 * lam * t2);
            if (w == 0.0 && lam > 0.0) continue;
            acc.add(w * ce[i] * cf[i]);
        }
        out.value = std::sqrt(8.0) * t * acc.value();
        out.path = Path::LaplacianPairing;
        out.pairs = ce.size();
        out.seconds = elapsed(t0);
        return out;
    }

    if (path != Path::GradientPairing)
        throw Error("polarization paths are gradient-pairing or laplacian-pairing");
    if (s.dim() != 1 || !s.is_uniform_grid())
        throw UnsupportedGeometry("gradient pairing needs a 1-D uniform grid");
    std::vector<double> chi_e(e.membership.begin(), e.membership.end());
    std::vector<double> chi_f(f.membership.begin(), f.membership.end());
    const auto he = engine.apply(t2, chi_e);
    const auto hf = engine.apply(t2, chi_f);
    const std::size_t n = s.size();
    const double h = s.spacing();
    const bool closed = s.is_closed();
    KahanSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        double de, df;
        if (closed) {
            de = (he[(i + 1) % n] - he[(i + n - 1) % n]) / (2.0 * h);
            df = (hf[(i + 1) % n] - hf[(i + n - 1) % n]) / (2.0 * h);
        } else {
            if (i == 0 || i == n - 1) continue;
            de = (he[i + 1] - he[i - 1]) / (2.0 * h);
            df = (hf[i + 1] - hf[i - 1]) / (2.0 * h);
        }
        acc.add(de * df * s.weight(i));
    }
    out.value = std::sqrt(8.0) * t * acc.value();
    out.path = Path::GradientPairing;
    out.pairs = n;
    out.seconds = elapsed(t0);
    return out;
}

double ks_functional(const MetricMeasureSpace& space, const ScalarField& f, double p, double r) {
    if (space.is_uniform_grid() && !(r > space.spacing()))
        throw RadiusBelowResolution("ball radius must exceed the grid spacing");
    const std::size_t n = space.size();
    std::vector<KahanSum> partials(num_chunks(n));
    parallel_for_chunks(n, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        KahanSum acc;
        for (std::size_t i = lo; i < hi; ++i) {
            KahanSum inner;
            double ball = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (space.dist(i, j) < r) {
                    ball += space.weight(j);
                    inner.add(pow_abs(f.values[i] - f.values[j], p) * space.weight(j));
                }
            }
            if (ball > 0.0) acc.add(inner.value() / ball * space.weight(i));
        }
        partials[c] = acc;
    });
    return reduce_in_order(partials) / std::pow(r, p);
}

double blowup_profile(const HeatKernelEngine& engine, const IndicatorSet& e, double x, double t,
                      bool analytic) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    const auto& s = engine.space();
    if (s.dim() != 1 || !s.is_uniform_grid())
        throw UnsupportedGeometry("blow-up profile needs a 1-D grid");
    const double t2 = t * t;

    if (analytic) {
        if (!e.boundary || !engine_is_flat_1d(engine))
            throw NoBoundaryOracle("analytic blow-up needs a flat engine and exact jumps");
        const auto& prof = *e.boundary;
        if (prof.breakpoints.empty()) return 0.0;
        // Gather contributing jumps (with periodic images) within kernel reach.
        const double reach = std::sqrt(4.0 * 60.0 * t2) + 6.0 * std::sqrt(t2);
        std::vector<std::pair<double, double>> jumps;  // position, signed size
        if (prof.periodic) {
            const double L = s.period();
            const int kimg =
                static_cast<int>(std::ceil((reach + L) / L)) + 1;
            for (std::size_t k = 0; k < prof.breakpoints.size(); ++k)
                for (int img = -kimg; img <= kimg; ++img)
                    jumps.emplace_back(prof.breakpoints[k] + static_cast<double>(img) * L,
                                       prof.jump(k));
        } else {
            for (std::size_t k = 0; k < prof.breakpoints.size(); ++k)
                jumps.emplace_back(prof.breakpoints[k], prof.jump(k));
        }
        std::sort(jumps.begin(), jumps.end());
        // |∇h_{t²}χ| = |Σ_k Δ_k p_{t²}(·-a_k)| carries the sign of the nearest
        // jump on each Voronoi segment; crossing points sit at segment
        // midpoints up to exp(-gap²/16t²) slivers.
        KahanSum acc;
        const double far = 1e30;
        for (std::size_t seg = 0; seg < jumps.size(); ++seg) {
            const double lo = (seg == 0) ? -far : 0.5 * (jumps[seg - 1].first + jumps[seg].first);
            const double hi = (seg + 1 == jumps.size())
                                  ? far
                                  : 0.5 * (jumps[seg].first + jumps[seg + 1].first);
            const double sign = jumps[seg].second > 0 ? 1.0 : -1.0;
            for (const auto& [pos, dj] : jumps) {
                if (std::fabs(pos - jumps[seg].first) > reach) continue;
                acc.add(sign * dj * gauss_product_segment(t2, t2, x, pos, lo, hi));
            }
        }
        return t * acc.value();
    }

    // Symmetric-difference path on the grid.
    std::vector<double> chi(e.membership.begin(), e.membership.end());
    const auto h_chi = engine.apply(t2, chi);
    const std::size_t n = s.size();
    const double h = s.spacing();
    const bool closed = s.is_closed();
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (closed)
            grad[i] = std::fabs(h_chi[(i + 1) % n] - h_chi[(i + n - 1) % n]) / (2.0 * h);
        else if (i > 0 && i + 1 < n)
            grad[i] = std::fabs(h_chi[i + 1] - h_chi[i - 1]) / (2.0 * h);
    }
    const auto smoothed = engine.apply(t2, grad);
    // Evaluate at the grid point nearest to x.
    std::size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::fabs(s.position(i) - x);
        if (closed) d = std::min(d, s.period() - d);
        if (d < bestd) {
            bestd = d;
            best = i;
        }
    }
    return t * smoothed[best];
}

}  // namespace heatbv
