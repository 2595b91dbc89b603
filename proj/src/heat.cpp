#include "heatbv/heat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include <Eigen/Dense>

#include "heatbv/errors.hpp"
#include "heatbv/parallel.hpp"
#include "heatbv/special.hpp"
#include "heatbv/sum.hpp"

namespace heatbv {

namespace {

// Pairs with d²/4t > 46 contribute < 1e-20 relative and are skipped.
constexpr double kCutoffExponent = 46.0;

double cutoff_distance(double t) { return std::sqrt(4.0 * kCutoffExponent * t); }

std::vector<double> random_unit_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(n);
    for (auto& v : f) v = u(rng);
    return f;
}

double dot_weighted(const MetricMeasureSpace& s, const std::vector<double>& a,
                    const std::vector<double>& b) {
    KahanSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i] * s.weight(i));
    return acc.value();
}

}  // namespace

void HeatKernelEngine::check_time(double t) const {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive, got " + std::to_string(t));
}

OffsetKernel HeatKernelEngine::build_offset_kernel(double t) const {
    const auto& s = *space_;
    if (!s.is_uniform_grid() || s.dim() != 1)
        throw UnsupportedGeometry("offset kernels exist on uniform 1-D grids only");
    const double h = s.spacing();
    const std::size_t n = s.axis_resolution();
    OffsetKernel k;
    k.n = n;
    k.periodic = s.is_closed();
    const std::size_t hard_max = k.periodic ? n / 2 : n - 1;
    const double dcut = cutoff_distance(t);
    std::size_t omax = static_cast<std::size_t>(std::floor(dcut / h)) + 1;
    k.max_offset = std::min(omax, hard_max);
    k.kappa.resize(k.max_offset + 1);
    for (std::size_t o = 0; o <= k.max_offset; ++o) {
        double d = static_cast<double>(o) * h;
        if (k.periodic) d = std::min(d, s.period() - d);
        k.kappa[o] = kernel_1d(t, d);
    }
    return k;
}

std::shared_ptr<const OffsetKernel> HeatKernelEngine::offset_kernel(double t) const {
    check_time(t);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = offset_cache_.find(t);
    if (it == offset_cache_.end()) {
        auto built = std::make_shared<const OffsetKernel>(build_offset_kernel(t));
        std::size_t bytes = 0;
        for (const auto& [key, val] : offset_cache_) bytes += val->kappa.size() * sizeof(double);
        if (bytes + built->kappa.size() * sizeof(double) > cache_budget_) {
            // Over budget: stream (hand the table out without caching it).
            return built;
        }
        it = offset_cache_.emplace(t, std::move(built)).first;
    }
    return it->second;
}

double HeatKernelEngine::row_mass(double t, std::size_t j) const {
    check_time(t);
    const auto& s = *space_;
    KahanSum acc;
    for (std::size_t i = 0; i < s.size(); ++i) acc.add(kernel(t, i, j) * s.weight(i));
    return acc.value();
}

namespace {

/// 1-D convolution against an offset table; clips at the ends for open grids,
/// wraps for closed ones. Offsets beyond the table are below the cutoff.
void convolve_1d(const OffsetKernel& k, double h, const double* f, double* out,
                 std::size_t n, std::size_t stride) {
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t omax = static_cast<std::ptrdiff_t>(k.max_offset);
    const bool full_wrap = k.periodic && 2 * omax + 1 >= nn;
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        KahanSum acc;
        if (k.periodic) {
            if (full_wrap) {
                for (std::ptrdiff_t j = 0; j < nn; ++j) {
                    std::ptrdiff_t o = std::abs(i - j);
                    o = std::min(o, nn - o);
                    acc.add(k.kappa[static_cast<std::size_t>(o)] * f[j * stride]);
                }
            } else {
                for (std::ptrdiff_t o = -omax; o <= omax; ++o) {
                    std::ptrdiff_t j = (i + o) % nn;
                    if (j < 0) j += nn;
                    acc.add(k.kappa[static_cast<std::size_t>(std::abs(o))] * f[j * stride]);
                }
            }
        } else {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - omax);
            const std::ptrdiff_t hi = std::min(nn - 1, i + omax);
            for (std::ptrdiff_t j = lo; j <= hi; ++j)
                acc.add(k.kappa[static_cast<std::size_t>(std::abs(i - j))] * f[j * stride]);
        }
        out[i * stride] = acc.value() * h;
    }
}

}  // namespace

// --- closed-form Gaussian ----------------------------------------------------

ClosedFormGaussianEngine::ClosedFormGaussianEngine(const MetricMeasureSpace& space)
    : HeatKernelEngine(space, Backend::ClosedFormGaussian) {
    if (space.kind() != GeometryKind::LineGrid && space.kind() != GeometryKind::EuclideanGrid)
        throw UnsupportedGeometry("closed-form Gaussian engine needs a line or euclidean grid");
}

double ClosedFormGaussianEngine::kernel_1d(double t, double d) const {
    return gauss_kernel(t, d, 1);
}

double ClosedFormGaussianEngine::kernel(double t, std::size_t i, std::size_t j) const {
    check_time(t);
    return gauss_kernel(t, space_->dist(i, j), space_->dim());
}

std::vector<double> ClosedFormGaussianEngine::apply(double t, const std::vector<double>& f) const {
    check_time(t);
    const auto& s = *space_;
    const auto kp = offset_kernel(t);
    const auto& k = *kp;
    const double h = s.spacing();
    std::vector<double> out(f.size());
    if (s.dim() == 1) {
        convolve_1d(k, h, f.data(), out.data(), s.size(), 1);
        return out;
    }
    // Separable product on the euclidean grid: convolve rows, then columns.
    const std::size_t n = s.axis_resolution();
    std::vector<double> mid(f.size());
    parallel_for_chunks(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r)
            convolve_1d(k, h, f.data() + r * n, mid.data() + r * n, n, 1);
    }, 8);
    parallel_for_chunks(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c)
            convolve_1d(k, h, mid.data() + c, out.data() + c, n, n);
    }, 8);
    return out;
}

// --- image sum ---------------------------------------------------------------

ImageSumEngine::ImageSumEngine(const MetricMeasureSpace& space)
    : HeatKernelEngine(space, Backend::ImageSum) {
    if (!space.is_closed())
        throw UnsupportedGeometry("image-sum engine needs a circle or torus grid");
}

int ImageSumEngine::truncation_order(double t, double period) {
    // Dropped tail below 1e-14 of the kept sum.
    return static_cast<int>(std::ceil(6.0 * std::log(10.0) * std::sqrt(t) / period)) + 2;
}

double ImageSumEngine::kernel_1d(double t, double d) const {
    const double L = space_->period();
    const int kimg = truncation_order(t, L);
    KahanSum acc;
    for (int m = -kimg; m <= kimg; ++m)
        acc.add(gauss_kernel(t, d + static_cast<double>(m) * L, 1));
    return acc.value();
}

double ImageSumEngine::kernel(double t, std::size_t i, std::size_t j) const {
    check_time(t);
    const auto& s = *space_;
    if (s.dim() == 1) {
        double d = std::fabs(s.position(i) - s.position(j));
        d = std::min(d, s.period() - d);
        return kernel_1d(t, d);
    }
    const auto pi = s.point(i), pj = s.point(j);
    double prod = 1.0;
    for (int ax = 0; ax < 2; ++ax) {
        double d = std::fabs(pi[static_cast<std::size_t>(ax)] - pj[static_cast<std::size_t>(ax)]);
        d = std::min(d, s.period() - d);
        prod *= kernel_1d(t, d);
    }
    return prod;
}

std::vector<double> ImageSumEngine::apply(double t, const std::vector<double>& f) const {
    check_time(t);
    const auto& s = *space_;
    const auto kp = offset_kernel(t);
    const auto& k = *kp;
    const double h = s.period() / static_cast<double>(s.axis_resolution());
    std::vector<double> out(f.size());
    if (s.dim() == 1) {
        convolve_1d(k, h, f.data(), out.data(), s.size(), 1);
        return out;
    }
    const std::size_t n = s.axis_resolution();
    std::vector<double> mid(f.size());
    parallel_for_chunks(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r)
            convolve_1d(k, h, f.data() + r * n, mid.data() + r * n, n, 1);
    }, 8);
    parallel_for_chunks(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c)
            convolve_1d(k, h, mid.data() + c, out.data() + c, n, n);
    }, 8);
    return out;
}

// --- spectral ----------------------------------------------------------------

SpectralEngine::SpectralEngine(const MetricMeasureSpace& space, std::size_t modes)
    : HeatKernelEngine(space, Backend::Spectral) {
    const auto kind = space.kind();
    if (kind == GeometryKind::CircleGrid || kind == GeometryKind::TorusGrid) {
        const std::size_t n = space.axis_resolution();
        if (n % 2 != 0) throw UnsupportedGeometry("spectral grid engine needs even resolution");
        modes_ = (modes == 0) ? n : std::min(modes, n);
        return;
    }
    if (kind == GeometryKind::WeightedGraph) {
        const std::size_t n = space.size();
        modes_ = (modes == 0) ? n : std::min(modes, n);
        // Weighted graph Laplacian Lf(x) = (1/w_x) Σ w_xy (f(y)-f(x)), made
        // symmetric as W^{-1/2} (D-A) W^{-1/2}; φ = W^{-1/2} v are orthonormal
        // in the weighted inner product.
        Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(n));
        for (const auto& e : space.graph_edges()) {
            const auto u = static_cast<Eigen::Index>(e.u), v = static_cast<Eigen::Index>(e.v);
            lap(u, v) -= e.w;
            lap(v, u) -= e.w;
            lap(u, u) += e.w;
            lap(v, v) += e.w;
        }
        Eigen::VectorXd invsqrtw(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            invsqrtw(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(space.weight(i));
        Eigen::MatrixXd sym = invsqrtw.asDiagonal() * lap * invsqrtw.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        if (es.info() != Eigen::Success) throw Error("graph eigendecomposition failed");
        SpectralData data;
        data.n = n;
        data.m = modes_;
        data.lambda.resize(modes_);
        data.phi.resize(n * modes_);
        for (std::size_t i = 0; i < modes_; ++i) {
            data.lambda[i] = std::max(0.0, es.eigenvalues()(static_cast<Eigen::Index>(i)));
            for (std::size_t x = 0; x < n; ++x)
                data.phi[i * n + x] = es.eigenvectors()(static_cast<Eigen::Index>(x),
                                                        static_cast<Eigen::Index>(i)) *
                                      invsqrtw(static_cast<Eigen::Index>(x));
        }
        graph_data_ = std::move(data);
        return;
    }
    throw UnsupportedGeometry("spectral engine needs a circle, torus, or graph");
}

SpectralEngine::SpectralEngine(const MetricMeasureSpace& space, const SpectralData& data)
    : HeatKernelEngine(space, Backend::Spectral) {
    if (space.kind() != GeometryKind::WeightedGraph)
        throw UnsupportedGeometry("sidecar restore is for graph engines");
    if (data.n != space.size()) throw IoError("sidecar dimension does not match the space");
    modes_ = data.m;
    graph_data_ = data;
}

namespace {
struct GridModeSet {
    std::size_t m_max = 0;   // highest full cos/sin pair frequency
    bool nyquist = false;    // include the alternating Nyquist mode
    double lambda_max = 0.0;
};

GridModeSet grid_modes(std::size_t modes, std::size_t n, double period) {
    GridModeSet ms;
    if (modes >= n) {
        ms.m_max = n / 2 - 1;
        ms.nyquist = true;
        const double lam = kPi * static_cast<double>(n) / period;
        ms.lambda_max = lam * lam;
    } else {
        ms.m_max = (modes >= 1) ? (modes - 1) / 2 : 0;
        const double lam = 2.0 * kPi * static_cast<double>(ms.m_max) / period;
        ms.lambda_max = lam * lam;
    }
    return ms;
}
}  // namespace

void SpectralEngine::check_truncation(double t) const {
    double lambda_max = 0.0;
    if (graph_data_) {
        lambda_max = graph_data_->lambda.empty() ? 0.0 : graph_data_->lambda[modes_ - 1];
    } else {
        lambda_max =
            grid_modes(modes_, space_->axis_resolution(), space_->period()).lambda_max;
    }
    if (std::exp(-lambda_max * t) > 1e-14)
        throw SpectralTruncationInsufficient(
            "t too small for " + std::to_string(modes_) + " modes (e^{-λ_M t} > 1e-14)");
}

double SpectralEngine::lambda(std::size_t i) const {
    if (graph_data_) return graph_data_->lambda.at(i);
    // Grid eigenvalues in ascending order: 0, then pairs (2πm/L)², then Nyquist.
    if (i == 0) return 0.0;
    const double L = space_->period();
    const auto ms = grid_modes(modes_, space_->axis_resolution(), space_->period());
    const std::size_t pair = (i + 1) / 2;
    if (pair <= ms.m_max) {
        const double lam = 2.0 * kPi * static_cast<double>(pair) / L;
        return lam * lam;
    }
    if (ms.nyquist && i == 2 * ms.m_max + 1) return ms.lambda_max;
    throw Error("eigenvalue index out of range");
}

double SpectralEngine::kernel_1d(double t, double d) const {
    const double L = space_->period();
    const auto ms = grid_modes(modes_, space_->axis_resolution(), L);
    KahanSum acc(1.0 / L);
    for (std::size_t m = 1; m <= ms.m_max; ++m) {
        const double lam = 2.0 * kPi * static_cast<double>(m) / L;
        const double w = std::exp(-lam * lam * t);
        if (w == 0.0) break;
        acc.add(2.0 / L * w * std::cos(lam * d));
    }
    if (ms.nyquist) {
        const double lamN = kPi * static_cast<double>(space_->axis_resolution()) / L;
        acc.add(std::exp(-lamN * lamN * t) / L *
                std::cos(lamN * d));
    }
    return acc.value();
}

OffsetKernel SpectralEngine::build_offset_kernel(double t) const {
    check_truncation(t);
    OffsetKernel k = HeatKernelEngine::build_offset_kernel(t);
    // Finite truncation can leave tiny negative lobes; clamp them, and treat
    // anything larger as a truncation failure.
    for (double& v : k.kappa) {
        if (v < 0.0) {
            if (v > -1e-12)
                v = 0.0;
            else
                throw SpectralTruncationInsufficient("spectral kernel negative beyond -1e-12");
        }
    }
    return k;
}

double SpectralEngine::kernel(double t, std::size_t i, std::size_t j) const {
    check_time(t);
    check_truncation(t);
    const auto& s = *space_;
    if (graph_data_) {
        const auto& gd = *graph_data_;
        KahanSum acc;
        for (std::size_t m = 0; m < modes_; ++m)
            acc.add(std::exp(-gd.lambda[m] * t) * gd.phi[m * gd.n + i] * gd.phi[m * gd.n + j]);
        double v = acc.value();
        if (v < 0.0 && v > -1e-12) v = 0.0;
        return v;
    }
    if (s.dim() == 1) {
        double d = std::fabs(s.position(i) - s.position(j));
        d = std::min(d, s.period() - d);
        double v = kernel_1d(t, d);
        if (v < 0.0 && v > -1e-12) v = 0.0;
        if (v < 0.0) throw SpectralTruncationInsufficient("spectral kernel negative beyond -1e-12");
        return v;
    }
    const auto pi = s.point(i), pj = s.point(j);
    double prod = 1.0;
    for (int ax = 0; ax < 2; ++ax) {
        double d = std::fabs(pi[static_cast<std::size_t>(ax)] - pj[static_cast<std::size_t>(ax)]);
        d = std::min(d, s.period() - d);
        double v = kernel_1d(t, d);
        if (v < 0.0 && v > -1e-12) v = 0.0;
        prod *= v;
    }
    return prod;
}

std::vector<double> SpectralEngine::apply(double t, const std::vector<double>& f) const {
    check_time(t);
    check_truncation(t);
    const auto& s = *space_;
    if (graph_data_) {
        const auto& gd = *graph_data_;
        std::vector<double> out(f.size(), 0.0);
        for (std::size_t m = 0; m < modes_; ++m) {
            KahanSum c;
            for (std::size_t x = 0; x < gd.n; ++x)
                c.add(gd.phi[m * gd.n + x] * f[x] * s.weight(x));
            const double g = std::exp(-gd.lambda[m] * t) * c.value();
            for (std::size_t x = 0; x < gd.n; ++x) out[x] += g * gd.phi[m * gd.n + x];
        }
        return out;
    }
    const auto kp = offset_kernel(t);
    const auto& k = *kp;
    const double h = s.period() / static_cast<double>(s.axis_resolution());
    std::vector<double> out(f.size());
    if (s.dim() == 1) {
        convolve_1d(k, h, f.data(), out.data(), s.size(), 1);
        return out;
    }
    const std::size_t n = s.axis_resolution();
    std::vector<double> mid(f.size());
    for (std::size_t r = 0; r < n; ++r)
        convolve_1d(k, h, f.data() + r * n, mid.data() + r * n, n, 1);
    for (std::size_t c = 0; c < n; ++c) convolve_1d(k, h, mid.data() + c, out.data() + c, n, n);
    return out;
}

std::vector<double> SpectralEngine::coefficients(const std::vector<double>& f) const {
    const auto& s = *space_;
    if (graph_data_) {
        const auto& gd = *graph_data_;
        std::vector<double> c(modes_);
        for (std::size_t m = 0; m < modes_; ++m) {
            KahanSum acc;
            for (std::size_t x = 0; x < gd.n; ++x)
                acc.add(gd.phi[m * gd.n + x] * f[x] * s.weight(x));
            c[m] = acc.value();
        }
        return c;
    }
    if (s.dim() != 1) throw UnsupportedGeometry("coefficients need a 1-D grid or graph");
    const double L = s.period();
    const std::size_t n = s.size();
    const double h = L / static_cast<double>(n);
    const auto ms = grid_modes(modes_, n, L);
    const std::size_t count = 1 + 2 * ms.m_max + (ms.nyquist ? 1 : 0);
    std::vector<double> c(count, 0.0);
    const double inv_sqrt_l = 1.0 / std::sqrt(L);
    const double amp = std::sqrt(2.0 / L);
    KahanSum c0;
    for (std::size_t x = 0; x < n; ++x) c0.add(inv_sqrt_l * f[x] * h);
    c[0] = c0.value();
    for (std::size_t m = 1; m <= ms.m_max; ++m) {
        const double w = 2.0 * kPi * static_cast<double>(m) / L;
        KahanSum cc, cs;
        for (std::size_t x = 0; x < n; ++x) {
            const double ph = w * s.position(x);
            cc.add(amp * std::cos(ph) * f[x] * h);
            cs.add(amp * std::sin(ph) * f[x] * h);
        }
        c[2 * m - 1] = cc.value();
        c[2 * m] = cs.value();
    }
    if (ms.nyquist) {
        KahanSum cn;
        for (std::size_t x = 0; x < n; ++x)
            cn.add(inv_sqrt_l * (x % 2 == 0 ? 1.0 : -1.0) * f[x] * h);
        c[count - 1] = cn.value();
    }
    return c;
}

std::vector<double> SpectralEngine::synthesize(const std::vector<double>& coeff,
                                               const std::vector<double>& gain) const {
    const auto& s = *space_;
    if (graph_data_) {
        const auto& gd = *graph_data_;
        std::vector<double> out(gd.n, 0.0);
        for (std::size_t m = 0; m < std::min(coeff.size(), modes_); ++m)
            for (std::size_t x = 0; x < gd.n; ++x)
                out[x] += gain[m] * coeff[m] * gd.phi[m * gd.n + x];
        return out;
    }
    const double L = s.period();
    const std::size_t n = s.size();
    const auto ms = grid_modes(modes_, n, L);
    std::vector<double> out(n, 0.0);
    const double inv_sqrt_l = 1.0 / std::sqrt(L);
    const double amp = std::sqrt(2.0 / L);
    for (std::size_t x = 0; x < n; ++x) out[x] += gain[0] * coeff[0] * inv_sqrt_l;
    for (std::size_t m = 1; m <= ms.m_max; ++m) {
        const double w = 2.0 * kPi * static_cast<double>(m) / L;
        const std::size_t ic = 2 * m - 1, is = 2 * m;
        if (gain[ic] == 0.0 && gain[is] == 0.0) continue;
        for (std::size_t x = 0; x < n; ++x) {
            const double ph = w * s.position(x);
            out[x] += amp * (gain[ic] * coeff[ic] * std::cos(ph) + gain[is] * coeff[is] * std::sin(ph));
        }
    }
    if (ms.nyquist) {
        const std::size_t in = coeff.size() - 1;
        for (std::size_t x = 0; x < n; ++x)
            out[x] += gain[in] * coeff[in] * inv_sqrt_l * (x % 2 == 0 ? 1.0 : -1.0);
    }
    return out;
}

SpectralData SpectralEngine::eigendata() const {
    if (graph_data_) return *graph_data_;
    const auto& s = *space_;
    if (s.dim() != 1) throw UnsupportedGeometry("eigendata export implemented for 1-D grids and graphs");
    const std::size_t n = s.size();
    const double L = s.period();
    const auto ms = grid_modes(modes_, n, L);
    const std::size_t count = 1 + 2 * ms.m_max + (ms.nyquist ? 1 : 0);
    SpectralData d;
    d.n = n;
    d.m = count;
    d.lambda.resize(count);
    d.phi.resize(n * count);
    const double inv_sqrt_l = 1.0 / std::sqrt(L);
    const double amp = std::sqrt(2.0 / L);
    d.lambda[0] = 0.0;
    for (std::size_t x = 0; x < n; ++x) d.phi[x] = inv_sqrt_l;
    for (std::size_t m = 1; m <= ms.m_max; ++m) {
        const double w = 2.0 * kPi * static_cast<double>(m) / L;
        d.lambda[2 * m - 1] = w * w;
        d.lambda[2 * m] = w * w;
        for (std::size_t x = 0; x < n; ++x) {
            const double ph = w * s.position(x);
            d.phi[(2 * m - 1) * n + x] = amp * std::cos(ph);
            d.phi[(2 * m) * n + x] = amp * std::sin(ph);
        }
    }
    if (ms.nyquist) {
        d.lambda[count - 1] = ms.lambda_max;
        for (std::size_t x = 0; x < n; ++x)
            d.phi[(count - 1) * n + x] = inv_sqrt_l * (x % 2 == 0 ? 1.0 : -1.0);
    }
    return d;
}

// --- sidecar -----------------------------------------------------------------

void save_spectral(const std::string& path, const SpectralData& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open sidecar for writing: " + path);
    out.write("HBK1", 4);
    auto put = [&](double v) { out.write(reinterpret_cast<const char*>(&v), sizeof(double)); };
    put(static_cast<double>(data.n));
    put(static_cast<double>(data.m));
    for (double v : data.lambda) put(v);
    out.write(reinterpret_cast<const char*>(data.phi.data()),
              static_cast<std::streamsize>(data.phi.size() * sizeof(double)));
    if (!out) throw IoError("sidecar write failed: " + path);
}

SpectralData load_spectral(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sidecar: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HBK1", 4) != 0) throw IoError("bad sidecar magic");
    auto get = [&]() {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof(double));
        return v;
    };
    SpectralData d;
    d.n = static_cast<std::size_t>(get());
    d.m = static_cast<std::size_t>(get());
    if (!in || d.n == 0 || d.m == 0 || d.m > d.n) throw IoError("bad sidecar header");
    d.lambda.resize(d.m);
    for (auto& v : d.lambda) v = get();
    d.phi.resize(d.n * d.m);
    in.read(reinterpret_cast<char*>(d.phi.data()),
            static_cast<std::streamsize>(d.phi.size() * sizeof(double)));
    if (!in) throw IoError("sidecar truncated");
    return d;
}

// --- factories ---------------------------------------------------------------

std::unique_ptr<HeatKernelEngine> make_engine(const MetricMeasureSpace& space, Backend b,
                                              std::size_t modes) {
    switch (b) {
        case Backend::ClosedFormGaussian:
            return std::make_unique<ClosedFormGaussianEngine>(space);
        case Backend::ImageSum:
            return std::make_unique<ImageSumEngine>(space);
        case Backend::Spectral:
            return std::make_unique<SpectralEngine>(space, modes);
    }
    throw Error("unknown backend");
}

std::unique_ptr<HeatKernelEngine> default_engine(const MetricMeasureSpace& space) {
    switch (space.kind()) {
        case GeometryKind::LineGrid:
        case GeometryKind::EuclideanGrid:
            return std::make_unique<ClosedFormGaussianEngine>(space);
        case GeometryKind::CircleGrid:
        case GeometryKind::TorusGrid:
            return std::make_unique<ImageSumEngine>(space);
        case GeometryKind::WeightedGraph:
            return std::make_unique<SpectralEngine>(space);
    }
    throw Error("unknown geometry");
}

// --- axioms ------------------------------------------------------------------

AxiomReport validate_axioms(const HeatKernelEngine& engine, const std::vector<double>& ts,
                            double tolerance) {
    if (ts.empty()) throw Error("validate_axioms needs a nonempty t list");
    const auto& s = engine.space();
    const std::size_t n = s.size();
    AxiomReport report;
    report.tolerance = tolerance;
    report.pass = true;

    const bool open_geometry =
        s.kind() == GeometryKind::LineGrid || s.kind() == GeometryKind::EuclideanGrid;

    // Compactly supported bump for the dual mass check on open geometries.
    std::vector<double> bump(n, 0.0);
    if (open_geometry && s.kind() == GeometryKind::LineGrid) {
        const double c = 0.5 * (s.line_a() + s.line_b());
        const double w = 0.25 * (s.line_b() - s.line_a());
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (s.position(i) - c) / w;
            bump[i] = std::fabs(u) < 1.0 ? std::cos(0.5 * kPi * u) * std::cos(0.5 * kPi * u) : 0.0;
        }
    }

    const auto f = random_unit_field(n, 0x5eedf00d);
    const auto g = random_unit_field(n, 0xdecafbad);
    const std::vector<double> ones(n, 1.0);

    for (double t : ts) {
        AxiomRow row;
        row.t = t;

        const std::size_t stride = std::max<std::size_t>(1, n / 64);
        double rowdef = 0.0;
        for (std::size_t j = 0; j < n; j += stride)
            rowdef = std::max(rowdef, std::fabs(engine.row_mass(t, j) - 1.0));
        row.row_mass_defect = rowdef;

        if (open_geometry && s.kind() == GeometryKind::LineGrid) {
            const auto hb = engine.apply(t, bump);
            const double m0 = dot_weighted(s, bump, ones);
            const double m1 = dot_weighted(s, hb, ones);
            row.mass_defect = std::fabs(m1 - m0) / m0;
        } else {
            row.mass_defect = rowdef;
        }

        const auto hf = engine.apply(t, f);
        const auto hg = engine.apply(t, g);
        row.self_adjoint_defect =
            std::fabs(dot_weighted(s, g, hf) - dot_weighted(s, f, hg));

        double sup = 0.0, fsup = 0.0;
        for (double v : f) fsup = std::max(fsup, std::fabs(v));
        for (double v : hf) sup = std::max(sup, std::fabs(v));
        double defect = std::max(0.0, sup - fsup);
        const auto h1 = engine.apply(t, ones);
        for (double v : h1) defect = std::max(defect, v - 1.0);
        row.max_principle_defect = defect;

        row.pass = row.mass_defect <= tolerance && row.self_adjoint_defect <= tolerance &&
                   row.max_principle_defect <= tolerance;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

GaussianBoundsReport validate_gaussian_bounds(const HeatKernelEngine& engine,
                                              const std::vector<double>& ts,
                                              const std::vector<double>& alphas, double budget) {
    const auto& s = engine.space();
    if (s.kind() == GeometryKind::WeightedGraph)
        throw UnsupportedGeometry("no K=0 curvature model for graphs");
    const std::size_t n = s.size();
    GaussianBoundsReport report;
    report.budget = budget;
    report.pass = true;

    const std::size_t cstride = std::max<std::size_t>(1, n / 16);
    for (double t : ts) {
        GaussianBoundsRow row;
        row.t = t;
        const double rt = std::sqrt(t);
        for (std::size_t x = 0; x < n; x += cstride) {
            const double ball = s.ball_mass(x, rt);
            if (!(ball > 0)) continue;
            const std::size_t ystride = std::max<std::size_t>(1, n / 64);
            for (std::size_t y = 0; y < n; y += ystride) {
                const double d = s.dist(x, y);
                const double p = engine.kernel(t, x, y);
                if (!(p > 0)) continue;
                const double lo = std::exp(-d * d / (3.0 * t)) / (ball * p);
                const double hi = p * ball * std::exp(d * d / (5.0 * t));
                row.c1_lower = std::max(row.c1_lower, lo);
                row.c1_upper = std::max(row.c1_upper, hi);
            }
        }
        report.pass = report.pass && row.c1_lower <= budget && row.c1_upper <= budget;
        report.rows.push_back(row);

        for (double alpha : alphas) {
            TailRow tr;
            tr.alpha = alpha;
            tr.r = rt;
            tr.gated = alpha > 1.0;
            double worst = 0.0;
            for (std::size_t x = 0; x < n; x += std::max<std::size_t>(1, n / 8)) {
                KahanSum acc;
                for (std::size_t y = 0; y < n; ++y)
                    if (s.dist(x, y) >= alpha * rt) acc.add(engine.kernel(t, x, y) * s.weight(y));
                worst = std::max(worst, acc.value());
            }
            tr.ratio = worst / std::exp(-alpha * alpha / 24.0);
            if (tr.gated) report.pass = report.pass && tr.ratio <= budget;
            report.tails.push_back(tr);
        }
    }
    return report;
}

// --- exact flows -------------------------------------------------------------

double exact_flow(const MetricMeasureSpace& space, const JumpProfile& f, double t, double x) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    if (f.breakpoints.empty()) return f.values.empty() ? 0.0 : f.values[0];
    if (!f.periodic) {
        double v = f.values[0];
        for (std::size_t k = 0; k < f.breakpoints.size(); ++k)
            v += f.jump(k) * step_heat_flow(t, x - f.breakpoints[k]);
        return v;
    }
    const double L = space.period();
    const int kimg = ImageSumEngine::truncation_order(t, L);
    // Arc integrals against the periodized kernel: Σ_i v_i ∫_{arc_i} p_t(x-y) dy.
    const std::size_t m = f.breakpoints.size();
    KahanSum acc;
    const double inv2 = 1.0 / (2.0 * std::sqrt(t));
    for (std::size_t k = 0; k < m; ++k) {
        const double a = f.breakpoints[k];
        const double b = (k + 1 < m) ? f.breakpoints[k + 1] : f.breakpoints[0] + L;
        for (int img = -kimg; img <= kimg; ++img) {
            const double shift = static_cast<double>(img) * L;
            const double mass =
                0.5 * (std::erf((b - x + shift) * inv2) - std::erf((a - x + shift) * inv2));
            acc.add(f.values[k] * mass);
        }
    }
    return acc.value();
}

double exact_flow_gradient(const MetricMeasureSpace& space, const JumpProfile& f, double t,
                           double x) {
    if (!(t > 0)) throw NonPositiveTime("heat time must be positive");
    if (f.breakpoints.empty()) return 0.0;
    KahanSum acc;
    if (!f.periodic) {
        for (std::size_t k = 0; k < f.breakpoints.size(); ++k)
            acc.add(f.jump(k) * gauss_kernel(t, x - f.breakpoints[k]));
        return acc.value();
    }
    const double L = space.period();
    const int kimg = ImageSumEngine::truncation_order(t, L);
    for (std::size_t k = 0; k < f.breakpoints.size(); ++k)
        for (int img = -kimg; img <= kimg; ++img)
            acc.add(f.jump(k) * gauss_kernel(t, x - f.breakpoints[k] + static_cast<double>(img) * L));
    return acc.value();
}

}  // namespace heatbv
