#ifndef BANDLAB_SPECTRAL_STATS_HPP
#define BANDLAB_SPECTRAL_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bandlab/ensemble.hpp"

namespace bandlab {

// semicircle density (1/2pi) sqrt(4-x^2) on [-2,2]
double semicircle_pdf(double x);
// its antiderivative: 1/2 + x sqrt(4-x^2)/(4pi) + asin(x/2)/pi
double semicircle_cdf(double x);
// inverse of the cdf on (0,1), by bisection
double semicircle_quantile(double p);

// Exact Kolmogorov-Smirnov distance between the empirical law of
// eigenvalues/scale and the semicircle law; evaluated at the n jump points
// with both one-sided gaps, no binning.
double ks_distance(std::span<const double> sorted_eigenvalues, double scale);

struct EdgeRow {
    int n = 0;
    int w = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double lambda_max = 0.0;
    double ratio = 0.0;  // lambda_max / sqrt(w)
    double ks = 0.0;
};

struct EdgeSummary {
    double mean_ratio = 0.0;
    double sd_ratio = 0.0;
    double mean_ks = 0.0;
    double max_ks = 0.0;
};

// One full-spectrum sample per (n, w, trial): records the top eigenvalue,
// its sqrt(W) ratio, and the KS distance of the scaled ESD. Grid points are
// the cartesian product of ns and ws; per-trial seeds derive from the master
// seed, so the row set is identical for any execution order.
std::vector<EdgeRow> edge_experiment(const EntryLaw& law, PatternKind pattern,
                                     std::span<const int> ns, std::span<const int> ws,
                                     int trials, std::uint64_t master_seed);

EdgeSummary summarize_edge(std::span<const EdgeRow> rows);

}  // namespace bandlab

#endif
