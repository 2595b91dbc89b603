#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "heatbv/field.hpp"
#include "heatbv/space.hpp"

namespace heatbv {

enum class Backend : std::uint8_t { ClosedFormGaussian, ImageSum, Spectral };

/// Kernel values of a 1-D translation-invariant grid as a function of the
/// index offset: kappa[o] = p_t(o·h) (periodized for closed geometries).
/// Offsets above max_offset are below the cutoff and treated as zero.
struct OffsetKernel {
    std::vector<double> kappa;
    std::size_t max_offset = 0;  // inclusive
    bool periodic = false;
    std::size_t n = 0;  // points per axis
};

/// Spectral eigendata: λ ascending, eigenvectors orthonormal under the
/// weighted inner product Σ φ φ' w.
struct SpectralData {
    std::size_t n = 0;  // points
    std::size_t m = 0;  // eigenpairs
    std::vector<double> lambda;
    std::vector<double> phi;  // column-major: phi[i*n + x] = φ_i(x)
};

/// Persist / restore eigendecompositions (binary sidecar, magic "HBK1",
/// little-endian doubles: N, M, λ[0..M), φ column-major).
void save_spectral(const std::string& path, const SpectralData& data);
SpectralData load_spectral(const std::string& path);

/// Heat kernel evaluator over a space. Engines are immutable after
/// construction / eigendecomposition; kernel evaluation and heat application
/// are pure. The per-t kernel cache uses single-writer insertion under a
/// mutex with read-only sharing afterward.
class HeatKernelEngine {
public:
    virtual ~HeatKernelEngine() = default;

    const MetricMeasureSpace& space() const { return *space_; }
    Backend backend() const { return backend_; }

    /// Pointwise kernel density p_t(x,y). Throws NonPositiveTime.
    virtual double kernel(double t, std::size_t i, std::size_t j) const = 0;

    /// Discrete heat flow: (h_t f)(x_i) = Σ_j p_t(x_i, x_j) f_j w_j.
    virtual std::vector<double> apply(double t, const std::vector<double>& f) const = 0;

    ScalarField apply(double t, const ScalarField& f) const {
        ScalarField out;
        out.values = apply(t, f.values);
        return out;
    }

    /// Σ_x p_t(x, y_j) w_x.
    virtual double row_mass(double t, std::size_t j) const;

    /// Offset-kernel table for uniform 1-D grids (line/circle); per-axis
    /// factor for the torus. Cached per t up to the memory budget.
    std::shared_ptr<const OffsetKernel> offset_kernel(double t) const;

    /// Memory budget for cached kernels, bytes.
    void set_cache_budget(std::size_t bytes) { cache_budget_ = bytes; }

protected:
    explicit HeatKernelEngine(const MetricMeasureSpace& space, Backend b)
        : space_(&space), backend_(b) {}

    virtual OffsetKernel build_offset_kernel(double t) const;
    /// 1-D kernel as a function of axis distance (line/circle axis factor).
    virtual double kernel_1d(double t, double d) const = 0;

    void check_time(double t) const;

    const MetricMeasureSpace* space_;
    Backend backend_;
    std::size_t cache_budget_ = std::size_t(2) << 30;  // 2 GiB

private:
    mutable std::mutex cache_mutex_;
    mutable std::map<double, std::shared_ptr<const OffsetKernel>> offset_cache_;
};

/// (4πt)^{-n/2} e^{-d²/4t} on line / euclidean grids (ℝⁿ emulation).
class ClosedFormGaussianEngine final : public HeatKernelEngine {
public:
    explicit ClosedFormGaussianEngine(const MetricMeasureSpace& space);
    double kernel(double t, std::size_t i, std::size_t j) const override;
    std::vector<double> apply(double t, const std::vector<double>& f) const override;

protected:
    double kernel_1d(double t, double d) const override;
};

/// Σ_{k∈ℤⁿ, |k_i|≤K} Gaussian(x, y+kL) on circle / torus grids. The
/// truncation K is chosen per t so the dropped tail is below 1e-14 of the
/// kept sum.
class ImageSumEngine final : public HeatKernelEngine {
public:
    explicit ImageSumEngine(const MetricMeasureSpace& space);
    double kernel(double t, std::size_t i, std::size_t j) const override;
    std::vector<double> apply(double t, const std::vector<double>& f) const override;

    static int truncation_order(double t, double period);

protected:
    double kernel_1d(double t, double d) const override;
};

/// Σ_{i<M} e^{-λ_i t} φ_i(x) φ_i(y). Circle/torus grids use the analytic
/// trigonometric eigenpairs (per axis); graphs eigendecompose the weighted
/// graph Laplacian Δf(x) = (1/w_x) Σ_{y~x} w_xy (f(y)-f(x)).
class SpectralEngine final : public HeatKernelEngine {
public:
    /// modes: eigenpairs per axis for grids, total for graphs; 0 = all (N).
    explicit SpectralEngine(const MetricMeasureSpace& space, std::size_t modes = 0);
    /// Restore a graph engine from a sidecar file.
    SpectralEngine(const MetricMeasureSpace& space, const SpectralData& data);

    double kernel(double t, std::size_t i, std::size_t j) const override;
    std::vector<double> apply(double t, const std::vector<double>& f) const override;

    std::size_t modes() const { return modes_; }
    double lambda(std::size_t i) const;
    /// Eigendata (graphs: computed; grids: sampled trigonometric modes).
    SpectralData eigendata() const;

    /// Weighted inner products ⟨f, φ_i⟩ for i < modes (1-D grids and graphs).
    std::vector<double> coefficients(const std::vector<double>& f) const;
    /// Reconstruct Σ c_i g(λ_i) φ_i(x) for all x.
    std::vector<double> synthesize(const std::vector<double>& coeff,
                                   const std::vector<double>& gain) const;

protected:
    double kernel_1d(double t, double d) const override;
    OffsetKernel build_offset_kernel(double t) const override;

private:
    void check_truncation(double t) const;
    std::size_t modes_ = 0;
    std::optional<SpectralData> graph_data_;  // graphs only
};

std::unique_ptr<HeatKernelEngine> make_engine(const MetricMeasureSpace& space, Backend b,
                                              std::size_t modes = 0);

/// Natural engine for a geometry: closed-form Gaussian on open grids,
/// image sum on closed grids, spectral on graphs.
std::unique_ptr<HeatKernelEngine> default_engine(const MetricMeasureSpace& space);

/// --- heat-flow axioms -----------------------------------------------------

struct AxiomRow {
    double t = 0;
    double mass_defect = 0;       // |∫ h_t f dm - ∫ f dm| (dual mass), or max row defect
    double row_mass_defect = 0;   // max_j |Σ_x p_t(x,y_j) w_x - 1| over sampled columns
    double self_adjoint_defect = 0;
    double max_principle_defect = 0;
    bool pass = false;
};

struct AxiomReport {
    std::vector<AxiomRow> rows;
    double tolerance = 1e-8;
    bool pass = false;
};

/// Checks mass preservation, self-adjointness and the weak maximum principle
/// at each t. Open geometries check dual mass on a compactly supported bump
/// (row masses are still reported); closed geometries check row masses.
AxiomReport validate_axioms(const HeatKernelEngine& engine, const std::vector<double>& ts,
                            double tolerance = 1e-8);

/// --- Gaussian bounds (flat K=0 models) ------------------------------------

struct GaussianBoundsRow {
    double t = 0;
    double c1_lower = 0;  // max exp(-d²/3t) / (m(B_√t(x)) p_t(x,y))
    double c1_upper = 0;  // max p_t(x,y) m(B_√t(x)) exp(+d²/5t)
};

struct TailRow {
    double alpha = 0;
    double r = 0;
    double ratio = 0;  // ∫_{X∖B_{αr}} p_{r²}(x,·) dm / e^{-α²/24}
    bool gated = true;  // α>1 rows gate the verdict; α≤1 is report-only
};

struct GaussianBoundsReport {
    std::vector<GaussianBoundsRow> rows;
    std::vector<TailRow> tails;
    double budget = 100.0;
    bool pass = false;
};

/// Empirical constants for the two-sided Gaussian bound and the tail bound.
/// Throws UnsupportedGeometry for graphs (no curvature model).
GaussianBoundsReport validate_gaussian_bounds(const HeatKernelEngine& engine,
                                              const std::vector<double>& ts,
                                              const std::vector<double>& alphas,
                                              double budget = 100.0);

/// --- exact flows of piecewise-constant fields (flat 1-D geometries) -------

/// h_t f(x) for an exact piecewise-constant profile on the line (erf steps)
/// or circle (image-summed arc integrals).
double exact_flow(const MetricMeasureSpace& space, const JumpProfile& f, double t, double x);

/// d/dx h_t f(x): signed sum of Gaussians at the jumps (+ periodic images).
double exact_flow_gradient(const MetricMeasureSpace& space, const JumpProfile& f, double t,
                           double x);

}  // namespace heatbv
