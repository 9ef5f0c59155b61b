#pragma once

#include <cmath>

namespace brentlab {

/// Neumaier-compensated running sum.
///
/// Integer-valued summands below 2^53 accumulate exactly; for general
/// doubles the error after merging is at most one ulp per merge, which is
/// what the deterministic band merges rely on.
class Accumulator {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    void merge(const Accumulator& other) noexcept {
        add(other.sum_);
        comp_ += other.comp_;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace brentlab
