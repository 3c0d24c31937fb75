#ifndef BANDLAB_CONCENTRATION_HPP
#define BANDLAB_CONCENTRATION_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandlab/ensemble.hpp"

namespace bandlab {

struct TailEstimate {
    std::string statistic;  // op_norm_over_sqrtN | quadratic_form | rhoL_over_sqrt_LlogN
    int n = 0;
    int L = 0;  // 0 unless the rho_L statistic
    std::vector<double> thresholds;
    std::vector<long long> exceed_counts;
    std::vector<double> exceed_prob;
    std::vector<double> lo95, hi95;  // Wilson
    int trials = 0;
    bool search_mode = false;            // rho_L by local search instead of exhaustive
    std::optional<double> fitted_slope;  // of -log(prob)/n against t^2, when >= 3 points
};

// empirical P(||X|| > t sqrt(n)) over Full-pattern samples
TailEstimate norm_tail_experiment(const EntryLaw& law, int n, std::span<const double> t_grid,
                                  int trials, std::uint64_t master_seed);

// empirical P(z* X* X z >= n t) = P(||Xz||^2 >= n t), |z| <= 1
TailEstimate quadratic_form_tail(const EntryLaw& law, int n,
                                 std::span<const std::complex<double>> z,
                                 std::span<const double> t_grid, int trials,
                                 std::uint64_t master_seed);

// empirical P(rho_L(X) >= t sqrt(L log n))
TailEstimate rhoL_tail_experiment(const EntryLaw& law, const SparsityPattern& pattern, int L,
                                  std::span<const double> t_grid, int trials,
                                  std::uint64_t master_seed, bool use_search = false);

struct EpsilonNet {
    int n = 0;
    double epsilon = 0.0;
    std::vector<std::complex<double>> points;  // count x n, point i contiguous
    int count = 0;
    double size_bound = 0.0;  // (2/epsilon)^(2n)
    int coverage_samples = 0;
    bool coverage_ok = false;

    const std::complex<double>* point(int i) const {
        return points.data() + static_cast<std::size_t>(i) * n;
    }
};

// Greedy packing on the complex unit sphere: candidates joining only when
// farther than epsilon from every net point, so the net is epsilon-separated
// and (near-maximality) an epsilon-cover. Coverage is verified on fresh
// uniform sphere points; uncovered points are adopted into the net once and
// coverage is re-verified.
EpsilonNet build_epsilon_net(int n, double epsilon, std::uint64_t seed, int coverage_samples);

struct NetBoundCheck {
    double lhs = 0.0;  // lambda_max(P)
    double rhs = 0.0;  // max_i z_i* P z_i / (1 - 2 eps)
    bool ok = false;
};

// lambda_max(P) <= max_i z_i* P z_i / (1-2eps) for PSD P
NetBoundCheck net_lambda_bound_check(const EpsilonNet& net, const HermitianMatrix& p);

struct MgfRow {
    double r = 0.0;
    double lhs = 0.0;    // E exp(rX)
    double mid = 0.0;    // 1 + 3 E[exp(d X^2)] (exp(r^2/d) - 1)
    double outer = 0.0;  // exp(3 r^2 E[exp(d X^2)] / d)
    bool ok = false;
};

// chain E e^{rX} <= 1 + 3E[e^{dX^2}](e^{r^2/d}-1) <= e^{3r^2 E[e^{dX^2}]/d}
// for real centered laws; closed forms where available, Gauss-Legendre
// quadrature for the bounded laws.
std::vector<MgfRow> mgf_bound_check(const EntryLaw& law, double delta,
                                    std::span<const double> r_grid);

struct LinearizationConstants {
    double tau_real = 0.0;  // sqrt(delta / 24K): makes 12 t^2 K/delta <= 1/2
    double c_real = 0.0;    // 12 K / delta
    double tau = 0.0;       // tau_real / sqrt(8)
    double c = 0.0;         // 4 c_real
};

LinearizationConstants linearization_constants(const EntryLaw& law);

struct LinearizationResult {
    double z_norm = 0.0;
    double tau = 0.0;
    double c = 0.0;
    double estimate = 0.0;  // MC estimate of E exp(|Y.z|^2)
    double stderr_ = 0.0;
    double bound = 0.0;  // exp(C |z|^2)
    bool ok = false;     // estimate - 4 stderr <= bound
};

// E exp(|Y.z|^2) <= exp(C|z|^2) for |z| <= tau, Y with iid real components
// from the law
LinearizationResult gaussian_linearization_check(const EntryLaw& law, int n,
                                                 std::span<const std::complex<double>> z,
                                                 int trials, std::uint64_t seed);

// regularized upper incomplete gamma Q(a, x); P(chi2_k >= x) = Q(k/2, x/2)
double gamma_q(double a, double x);
double chi_square_tail(int dof, double x);

}  // namespace bandlab

#endif
