#ifndef BANDLAB_STATS_HPP
#define BANDLAB_STATS_HPP

#include <cmath>
#include <span>
#include <utility>

namespace bandlab {

// Wilson score interval for a binomial proportion at z sigma (default 95%).
inline std::pair<double, double> wilson_interval(long long successes, long long trials,
                                                 double z = 1.959963984540054) {
    if (trials <= 0) return {0.0, 1.0};
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // the interval endpoints are exactly 0/1 at the degenerate counts
    double lo = successes == 0 ? 0.0 : center - half;
    double hi = successes == trials ? 1.0 : center + half;
    return {lo < 0.0 ? 0.0 : lo, hi > 1.0 ? 1.0 : hi};
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> xs) {
    if (xs.empty()) return {};
    long double sum = 0.0;
    for (double x : xs) sum += x;
    double mean = static_cast<double>(sum / xs.size());
    if (xs.size() == 1) return {mean, 0.0};
    long double ss = 0.0;
    for (double x : xs) {
        long double d = x - mean;
        ss += d * d;
    }
    double var = static_cast<double>(ss / (xs.size() - 1));
    return {mean, std::sqrt(var / xs.size())};
}

// slope/intercept of the least-squares line y = a + b x
inline std::pair<double, double> least_squares(std::span<const double> x,
                                               std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double b = sxx == 0.0 ? 0.0 : sxy / sxx;
    return {my - b * mx, b};
}

}  // namespace bandlab

#endif
