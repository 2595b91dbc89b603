#pragma once

#include <cstddef>
#include <vector>

namespace heatbv {

/// Kahan compensated accumulator. Double sums mix terms spanning many orders
/// of magnitude (e^{-d²/4t} tails against near-diagonal terms), and the path
/// agreement checks need ~1e-10 relative; plain accumulation loses that.
class KahanSum {
public:
    KahanSum() = default;
    explicit KahanSum(double v) : sum_(v) {}

    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    void add(const KahanSum& other) {
        add(other.sum_);
        add(-other.comp_);
    }

    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sums chunk partials in index order, independent of which thread produced
/// which chunk, so parallel reductions are bit-reproducible.
inline double reduce_in_order(const std::vector<KahanSum>& partials) {
    KahanSum total;
    for (const auto& p : partials) total.add(p);
    return total.value();
}

}  // namespace heatbv
