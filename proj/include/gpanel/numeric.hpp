#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace gpanel {

// Neumaier-compensated accumulator: the running compensation keeps the sum
// accurate even when terms differ by many orders of magnitude.
class NeumaierSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    NeumaierSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double compensated_mean(std::span<const double> xs) {
    return xs.empty() ? 0.0 : compensated_sum(xs) / static_cast<double>(xs.size());
}

// Smallest pairwise absolute gap; infinity for fewer than two values.
inline double min_pairwise_gap(std::span<const double> xs) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < xs.size(); ++a) {
        for (std::size_t b = a + 1; b < xs.size(); ++b) {
            gap = std::min(gap, std::abs(xs[a] - xs[b]));
        }
    }
    return gap;
}

}  // namespace gpanel
