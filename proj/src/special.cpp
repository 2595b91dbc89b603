#include "heatbv/special.hpp"

namespace heatbv {

namespace {
// Lanczos (g = 7) coefficients.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};
constexpr double kLanczosG = 7.0;
}  // namespace

double lanczos_gamma(double x) {
    if (x < 0.5) {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
        return kPi / (std::sin(kPi * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    const double t = x + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

}  // namespace heatbv
