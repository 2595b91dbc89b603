#include "heatbv/oracle.hpp"

#include <cmath>
#include <cstring>

#include "heatbv/errors.hpp"
#include "heatbv/special.hpp"

namespace heatbv::oracle {

namespace {

// Rational coefficients of the classical double-precision erf/erfc
// approximation (Sun fdlibm family): erf(x) = x + x·P(x²)/Q(x²) near zero,
// erfc(x) = exp(-z²-0.5625)·exp((z-x)(z+x)+R(s)/S(s))/x beyond, s = 1/x².
constexpr double erx = 8.45062911510467529297e-01;
constexpr double pp0 = 1.28379167095512558561e-01;
constexpr double pp1 = -3.25042107247001499370e-01;
constexpr double pp2 = -2.84817495755985104766e-02;
constexpr double pp3 = -5.77027029648944159157e-03;
constexpr double pp4 = -2.37630166566501626084e-05;
constexpr double qq1 = 3.97917223959155352819e-01;
constexpr double qq2 = 6.50222499887672944485e-02;
constexpr double qq3 = 5.08130628187576562776e-03;
constexpr double qq4 = 1.32494738004321644526e-04;
constexpr double qq5 = -3.96022827877536812320e-06;
constexpr double pa0 = -2.36211856075265944077e-03;
constexpr double pa1 = 4.14856118683748331666e-01;
constexpr double pa2 = -3.72207876035701323847e-01;
constexpr double pa3 = 3.18346619901161753674e-01;
constexpr double pa4 = -1.10894694282396677476e-01;
constexpr double pa5 = 3.54783043256182359371e-02;
constexpr double pa6 = -2.16637559486879084300e-03;
constexpr double qa1 = 1.06420880400844228286e-01;
constexpr double qa2 = 5.40397917702171048937e-01;
constexpr double qa3 = 7.18286544141962662868e-02;
constexpr double qa4 = 1.26171219808761642112e-01;
constexpr double qa5 = 1.36370839120290507362e-02;
constexpr double qa6 = 1.19844998467991074170e-02;
constexpr double ra0 = -9.86494403484714822705e-03;
constexpr double ra1 = -6.93858326784720833426e-01;
constexpr double ra2 = -1.05586262253232909814e+01;
constexpr double ra3 = -6.23753324503260060396e+01;
constexpr double ra4 = -1.62396669462573470355e+02;
constexpr double ra5 = -1.84605092906711035994e+02;
constexpr double ra6 = -8.12874355063065934246e+01;
constexpr double ra7 = -9.81432934416914548592e+00;
constexpr double sa1 = 1.96512716674392571292e+01;
constexpr double sa2 = 1.37657754143519042600e+02;
constexpr double sa3 = 4.34565877475229228821e+02;
constexpr double sa4 = 6.45387271733267880336e+02;
constexpr double sa5 = 4.29008140027567833386e+02;
constexpr double sa6 = 1.08635005541779435134e+02;
constexpr double sa7 = 6.57024977031928170135e+00;
constexpr double sa8 = -6.04244152148580987438e-02;
constexpr double rb0 = -9.86494292470009928597e-03;
constexpr double rb1 = -7.99283237680523006574e-01;
constexpr double rb2 = -1.77579549177547519889e+01;
constexpr double rb3 = -1.60636384855821916062e+02;
constexpr double rb4 = -6.37566443368389627722e+02;
constexpr double rb5 = -1.02509513161107724954e+03;
constexpr double rb6 = -4.83519191608651397019e+02;
constexpr double sb1 = 3.03380607434824582924e+01;
constexpr double sb2 = 3.25792512996573918826e+02;
constexpr double sb3 = 1.53672958608443695994e+03;
constexpr double sb4 = 3.19985821950859553908e+03;
constexpr double sb5 = 2.55305040643316442583e+03;
constexpr double sb6 = 4.74528541206955367215e+02;
constexpr double sb7 = -2.24409524465858183362e+01;

double clear_low_word(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    bits &= 0xffffffff00000000ull;
    std::memcpy(&x, &bits, sizeof(bits));
    return x;
}

}  // namespace

double erf_rational(double x) {
    const double ax = std::fabs(x);
    if (ax < 0.84375) {
        if (ax < 3.7e-9) return 2.0 * kInvSqrtPi * x;
        const double z = x * x;
        const double r = pp0 + z * (pp1 + z * (pp2 + z * (pp3 + z * pp4)));
        const double s = 1.0 + z * (qq1 + z * (qq2 + z * (qq3 + z * (qq4 + z * qq5))));
        return x + x * (r / s);
    }
    if (ax < 1.25) {
        const double s = ax - 1.0;
        const double P = pa0 + s * (pa1 + s * (pa2 + s * (pa3 + s * (pa4 + s * (pa5 + s * pa6)))));
        const double Q = 1.0 + s * (qa1 + s * (qa2 + s * (qa3 + s * (qa4 + s * (qa5 + s * qa6)))));
        return x >= 0 ? erx + P / Q : -erx - P / Q;
    }
    if (ax >= 6.0) return x >= 0 ? 1.0 : -1.0;
    return x >= 0 ? 1.0 - erfc_rational(ax) : erfc_rational(ax) - 1.0;
}

double erfc_rational(double x) {
    const double ax = std::fabs(x);
    if (ax < 0.84375) {
        if (ax < 1e-28) return 1.0 - x;
        const double z = x * x;
        const double r = pp0 + z * (pp1 + z * (pp2 + z * (pp3 + z * pp4)));
        const double s = 1.0 + z * (qq1 + z * (qq2 + z * (qq3 + z * (qq4 + z * qq5))));
        const double y = x * (r / s);  // erf(x) - x
        if (x < 0.25) return 1.0 - (x + y);
        return 0.5 - (y + (x - 0.5));
    }
    if (ax < 1.25) {
        const double s = ax - 1.0;
        const double P = pa0 + s * (pa1 + s * (pa2 + s * (pa3 + s * (pa4 + s * (pa5 + s * pa6)))));
        const double Q = 1.0 + s * (qa1 + s * (qa2 + s * (qa3 + s * (qa4 + s * (qa5 + s * qa6)))));
        return x >= 0 ? (1.0 - erx) - P / Q : 1.0 + erx + P / Q;
    }
    if (ax >= 28.0) return x >= 0 ? 0.0 : 2.0;
    const double s = 1.0 / (ax * ax);
    double R, S;
    if (ax < 1.0 / 0.35) {
        R = ra0 + s * (ra1 + s * (ra2 + s * (ra3 + s * (ra4 + s * (ra5 + s * (ra6 + s * ra7))))));
        S = 1.0 +
            s * (sa1 + s * (sa2 + s * (sa3 + s * (sa4 + s * (sa5 + s * (sa6 + s * (sa7 + s * sa8)))))));
    } else {
        R = rb0 + s * (rb1 + s * (rb2 + s * (rb3 + s * (rb4 + s * (rb5 + s * rb6)))));
        S = 1.0 + s * (sb1 + s * (sb2 + s * (sb3 + s * (sb4 + s * (sb5 + s * (sb6 + s * sb7))))));
    }
    const double z = clear_low_word(ax);
    const double r = std::exp(-z * z - 0.5625) * std::exp((z - ax) * (z + ax) + R / S);
    return x >= 0 ? r / ax : 2.0 - r / ax;
}

OracleValue halfline_bv_exact(double t) {
    if (!(t > 0)) throw NonPositiveTime("oracle needs t > 0");
    OracleValue v;
    v.method = OracleMethod::ErfcClosedForm;
    v.value = 2.0 * std::sqrt(t / kPi);
    v.bound = 1e-15 * v.value;
    return v;
}

OracleValue halfline_bv_quadrature(double t, std::size_t panels) {
    if (!(t > 0)) throw NonPositiveTime("oracle needs t > 0");
    // 2 ∫₀^∞ ½ erfc(x/(2√t)) dx, truncated where erfc underflows.
    const double hi = 2.0 * std::sqrt(t) * 27.0;
    const double h = hi / static_cast<double>(panels);
    long double acc = 0.25L * erfc_rational(0.0);  // half weight at x = 0
    for (std::size_t i = 1; i < panels; ++i)
        acc += 0.5L * erfc_rational(static_cast<double>(i) * h / (2.0 * std::sqrt(t)));
    OracleValue v;
    v.method = OracleMethod::ErfcClosedForm;
    v.value = 2.0 * static_cast<double>(acc) * h;
    v.bound = h * h / (12.0 * std::sqrt(4.0 * kPi * t)) * 2.0 + 1e-14 * v.value;
    return v;
}

OracleValue quadrature_energy(const FieldSpec& f, double p, double lo, double hi,
                              std::size_t base_n, bool periodic) {
    auto trapezoid = [&](std::size_t n) {
        const double h = (hi - lo) / static_cast<double>(n);
        long double acc = 0.0L;
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = lo + static_cast<double>(i) * h;
            double v = std::pow(std::fabs(f.derivative(x)), p);
            if (!periodic && (i == 0 || i == n)) v *= 0.5;
            if (periodic && i == n) v = 0.0;  // wraps onto i = 0
            acc += v;
        }
        return static_cast<double>(acc) * h;
    };
    const double i10 = trapezoid(10 * base_n);
    const double i20 = trapezoid(20 * base_n);
    OracleValue v;
    v.method = OracleMethod::Quadrature10x;
    v.value = (4.0 * i20 - i10) / 3.0;  // Richardson for the h² term
    v.bound = std::fabs(i20 - i10) / 3.0 + 1e-14 * std::fabs(v.value) + 1e-15;
    return v;
}

namespace {

long double oracle_kernel(const MetricMeasureSpace& s, double t, std::size_t i, std::size_t j) {
    // Recomputed from raw distances; deliberately shares nothing with the
    // engines (no cache, its own truncation rule).
    const long double tl = t;
    auto gauss1 = [&](long double d) {
        return std::exp(-d * d / (4.0L * tl)) / std::sqrt(4.0L * static_cast<long double>(kPi) * tl);
    };
    switch (s.kind()) {
        case GeometryKind::LineGrid:
            return gauss1(s.dist(i, j));
        case GeometryKind::CircleGrid: {
            const long double L = s.period();
            const int kimg = static_cast<int>(std::ceil(std::sqrt(320.0 * t) / s.period())) + 2;
            long double acc = 0.0L;
            const long double d = std::fabs(s.position(i) - s.position(j));
            for (int m = -kimg; m <= kimg; ++m) acc += gauss1(d + m * L);
            return acc;
        }
        case GeometryKind::EuclideanGrid: {
            const long double d = s.dist(i, j);
            return std::exp(-d * d / (4.0L * tl)) /
                   (4.0L * static_cast<long double>(kPi) * tl);
        }
        case GeometryKind::TorusGrid: {
            const long double L = s.period();
            const int kimg = static_cast<int>(std::ceil(std::sqrt(320.0 * t) / s.period())) + 2;
            const auto pi_ = s.point(i), pj_ = s.point(j);
            long double prod = 1.0L;
            for (int ax = 0; ax < 2; ++ax) {
                const long double d =
                    std::fabs(pi_[static_cast<std::size_t>(ax)] - pj_[static_cast<std::size_t>(ax)]);
                long double acc = 0.0L;
                for (int m = -kimg; m <= kimg; ++m) acc += gauss1(d + m * L);
                prod *= acc;
            }
            return prod;
        }
        case GeometryKind::WeightedGraph:
            throw UnsupportedGeometry("pair enumeration oracle has no graph kernel");
    }
    return 0.0L;
}

}  // namespace

OracleValue pair_enumeration(const MetricMeasureSpace& space, const std::vector<double>& f,
                             double p, double t) {
    const std::size_t n = space.size();
    if (n > 512) throw SpaceTooLarge("pair enumeration is capped at N = 512");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const long double d = std::fabs(static_cast<long double>(f[i]) - f[j]);
            acc += oracle_kernel(space, t, i, j) * std::pow(d, static_cast<long double>(p)) *
                   space.weight(i) * space.weight(j);
        }
    OracleValue v;
    v.method = OracleMethod::PairEnumeration;
    v.value = static_cast<double>(acc);
    v.bound = 1e-13 * std::fabs(v.value) + 1e-18;
    return v;
}

OracleValue pairing_enumeration(const MetricMeasureSpace& space, const std::vector<double>& f,
                                const std::vector<double>& g, double t) {
    const std::size_t n = space.size();
    if (n > 512) throw SpaceTooLarge("pair enumeration is capped at N = 512");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double hf = 0.0L;
        for (std::size_t j = 0; j < n; ++j)
            hf += oracle_kernel(space, t, i, j) * f[j] * space.weight(j);
        acc += (static_cast<long double>(f[i]) - hf) * g[i] * space.weight(i);
    }
    OracleValue v;
    v.method = OracleMethod::PairEnumeration;
    v.value = static_cast<double>(acc);
    v.bound = 1e-13 * std::fabs(v.value) + 1e-18;
    return v;
}

}  // namespace heatbv::oracle
