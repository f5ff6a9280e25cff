#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rbvix {

/// Running count, mean and sum of squared deviations (Welford; Chan et al. merge).
struct Moments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const Moments& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
        const double n = na + nb;
        const double d = other.mean - mean;
        mean += d * (nb / n);
        m2 += other.m2 + d * d * (na * nb / n);
        count += other.count;
    }

    /// Unbiased sample variance; 0 with fewer than two observations.
    double variance() const { return count > 1 ? std::max(m2, 0.0) / static_cast<double>(count - 1) : 0.0; }
    double std_error() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

/// Merges in the given order, so the result is independent of how the parts were produced.
inline Moments merge_ordered(const std::vector<Moments>& parts) {
    Moments total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

}  // namespace rbvix
