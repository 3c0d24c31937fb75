#include "bandlab/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bandlab/eigen.hpp"
#include "bandlab/stats.hpp"

namespace bandlab {

double semicircle_pdf(double x) {
    if (x <= -2.0 || x >= 2.0) return 0.0;
    return std::sqrt(4.0 - x * x) / (2.0 * M_PI);
}

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * M_PI) + std::asin(0.5 * x) / M_PI;
}

double semicircle_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("semicircle_quantile: p in (0,1)");
    double lo = -2.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (semicircle_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_distance(std::span<const double> sorted_eigenvalues, double scale) {
    const std::size_t n = sorted_eigenvalues.size();
    if (n == 0) throw std::invalid_argument("ks_distance: empty spectrum");
    if (!(scale > 0.0)) throw std::invalid_argument("ks_distance: scale must be > 0");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = semicircle_cdf(sorted_eigenvalues[i] / scale);
        double below = f - static_cast<double>(i) / n;
        double above = static_cast<double>(i + 1) / n - f;
        d = std::max({d, below, above});
    }
    return d;
}

std::vector<EdgeRow> edge_experiment(const EntryLaw& law, PatternKind pattern,
                                     std::span<const int> ns, std::span<const int> ws,
                                     int trials, std::uint64_t master_seed) {
    if (ns.empty() || ws.empty() || trials < 1)
        throw std::invalid_argument("edge_experiment: empty grid");
    std::vector<EdgeRow> rows;
    rows.reserve(ns.size() * ws.size() * trials);
    std::uint64_t grid_index = 0;
    for (int n : ns) {
        for (int w : ws) {
            SparsityPattern pat = SparsityPattern::build(pattern, n, w);
            const double scale = std::sqrt(static_cast<double>(w));
            for (int trial = 0; trial < trials; ++trial) {
                std::uint64_t seed = derive_seed(master_seed, "edge", grid_index, trial);
                HermitianMatrix x = HermitianMatrix::sample(law, pat, seed);
                Spectrum spec = eigen_full(x, false);
                EdgeRow row;
                row.n = n;
                row.w = w;
                row.trial = trial;
                row.seed = seed;
                row.lambda_max = spec.lambda_max();
                row.ratio = row.lambda_max / scale;
                row.ks = ks_distance(spec.eigenvalues, scale);
                rows.push_back(row);
            }
            ++grid_index;
        }
    }
    return rows;
}

EdgeSummary summarize_edge(std::span<const EdgeRow> rows) {
    EdgeSummary s;
    std::vector<double> ratios, kss;
    ratios.reserve(rows.size());
    kss.reserve(rows.size());
    for (const EdgeRow& r : rows) {
        ratios.push_back(r.ratio);
        kss.push_back(r.ks);
    }
    MeanStderr mr = mean_stderr(ratios);
    s.mean_ratio = mr.mean;
    s.sd_ratio = mr.stderr_ * std::sqrt(static_cast<double>(std::max<std::size_t>(ratios.size(), 1)));
    MeanStderr mk = mean_stderr(kss);
    s.mean_ks = mk.mean;
    s.max_ks = kss.empty() ? 0.0 : *std::max_element(kss.begin(), kss.end());
    return s;
}

}  // namespace bandlab
