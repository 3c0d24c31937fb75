#include "bandlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bandlab/eigen.hpp"
#include "bandlab/localization.hpp"
#include "bandlab/stats.hpp"

namespace bandlab {

namespace {

using cplx = std::complex<double>;

void check_t_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("tail experiment: empty threshold grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("tail experiment: thresholds must be increasing");
}

// counts, probabilities and Wilson intervals from per-trial statistic values;
// `ge` switches between strict > and >= exceedance
TailEstimate tally(std::string statistic, int n, int L, std::span<const double> t_grid,
                   std::span<const double> values, std::span<const double> cutoffs, bool ge) {
    TailEstimate est;
    est.statistic = std::move(statistic);
    est.n = n;
    est.L = L;
    est.trials = static_cast<int>(values.size());
    est.thresholds.assign(t_grid.begin(), t_grid.end());
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        long long count = 0;
        for (double v : values) count += ge ? (v >= cutoffs[ti]) : (v > cutoffs[ti]);
        est.exceed_counts.push_back(count);
        est.exceed_prob.push_back(static_cast<double>(count) / est.trials);
        auto [lo, hi] = wilson_interval(count, est.trials);
        est.lo95.push_back(lo);
        est.hi95.push_back(hi);
    }
    // slope of -log(p)/n against t^2 where the frequency is nonzero
    std::vector<double> xs, ys;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        if (est.exceed_counts[ti] > 0 && est.exceed_prob[ti] < 1.0) {
            xs.push_back(t_grid[ti] * t_grid[ti]);
            ys.push_back(-std::log(est.exceed_prob[ti]) / n);
        }
    }
    if (xs.size() >= 3) est.fitted_slope = least_squares(xs, ys).second;
    return est;
}

}  // namespace

TailEstimate norm_tail_experiment(const EntryLaw& law, int n, std::span<const double> t_grid,
                                  int trials, std::uint64_t master_seed) {
    check_t_grid(t_grid);
    if (trials < 1) throw std::invalid_argument("norm_tail: trials must be >= 1");
    SparsityPattern pat = SparsityPattern::full(n);
    std::vector<double> values(trials);
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t seed = derive_seed(master_seed, "norm_tail", 0, trial);
        HermitianMatrix x = HermitianMatrix::sample(law, pat, seed);
        values[trial] = eigen_full(x, false).spectral_radius();
    }
    std::vector<double> cutoffs;
    for (double t : t_grid) cutoffs.push_back(t * std::sqrt(static_cast<double>(n)));
    return tally("op_norm_over_sqrtN", n, 0, t_grid, values, cutoffs, /*ge=*/false);
}

TailEstimate quadratic_form_tail(const EntryLaw& law, int n, std::span<const cplx> z,
                                 std::span<const double> t_grid, int trials,
                                 std::uint64_t master_seed) {
    check_t_grid(t_grid);
    if (static_cast<int>(z.size()) != n)
        throw std::invalid_argument("quadratic_form_tail: |z| dimension mismatch");
    double zn2 = 0.0;
    for (const cplx& v : z) zn2 += std::norm(v);
    if (zn2 > 1.0 + 1e-12) throw std::invalid_argument("quadratic_form_tail: need |z| <= 1");
    SparsityPattern pat = SparsityPattern::full(n);
    std::vector<double> values(trials);
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t seed = derive_seed(master_seed, "quad_tail", 0, trial);
        HermitianMatrix x = HermitianMatrix::sample(law, pat, seed);
        std::vector<cplx> y(n);
        x.matvec(z.data(), y.data());
        double s = 0.0;
        for (const cplx& v : y) s += std::norm(v);
        values[trial] = s;
    }
    std::vector<double> cutoffs;
    for (double t : t_grid) cutoffs.push_back(t * n);
    return tally("quadratic_form", n, 0, t_grid, values, cutoffs, /*ge=*/true);
}

TailEstimate rhoL_tail_experiment(const EntryLaw& law, const SparsityPattern& pat, int L,
                                  std::span<const double> t_grid, int trials,
                                  std::uint64_t master_seed, bool use_search) {
    check_t_grid(t_grid);
    const int n = pat.n();
    std::vector<double> values(trials);
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t seed = derive_seed(master_seed, "rhoL_tail", 0, trial);
        HermitianMatrix x = HermitianMatrix::sample(law, pat, seed);
        if (use_search) {
            CounterRng rng(seed, 0x10C4);
            values[trial] = rho_L_search(x, L, 8, 4000, rng);
        } else {
            values[trial] = rho_L_exhaustive(x, L);
        }
    }
    std::vector<double> cutoffs;
    const double scale = std::sqrt(L * std::log(static_cast<double>(n)));
    for (double t : t_grid) cutoffs.push_back(t * scale);
    TailEstimate est = tally("rhoL_over_sqrt_LlogN", n, L, t_grid, values, cutoffs, /*ge=*/true);
    est.search_mode = use_search;
    return est;
}

namespace {

double min_dist2_to_net(const cplx* cand, const std::vector<cplx>& net, int n, double stop_below) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t count = net.size() / n;
    for (std::size_t p = 0; p < count; ++p) {
        const cplx* q = net.data() + p * n;
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += std::norm(cand[i] - q[i]);
        best = std::min(best, d);
        if (best <= stop_below) break;
    }
    return best;
}

}  // namespace

EpsilonNet build_epsilon_net(int n, double epsilon, std::uint64_t seed, int coverage_samples) {
    if (n < 1 || n > 4)
        throw std::invalid_argument("build_epsilon_net: n must be in 1..4 (cardinality bound)");
    if (!(epsilon > 0.0 && epsilon < 0.25))
        throw std::invalid_argument("build_epsilon_net: epsilon must be in (0, 1/4)");
    if (coverage_samples < 1)
        throw std::invalid_argument("build_epsilon_net: coverage_samples must be >= 1");

    EpsilonNet net;
    net.n = n;
    net.epsilon = epsilon;
    net.size_bound = std::pow(2.0 / epsilon, 2.0 * n);
    net.coverage_samples = coverage_samples;
    const double eps2 = epsilon * epsilon;
    // pack slightly below epsilon: a maximal 0.97eps-packing covers at
    // 0.97eps, so the finite candidate pool only has to fill dents deeper
    // than 0.03eps for the epsilon-coverage check
    const double pack = 0.97 * epsilon;
    const double pack2 = pack * pack;

    CounterRng cand_rng(seed, 1);
    const int batch = 512;
    std::vector<cplx> cand(static_cast<std::size_t>(batch) * n);
    std::vector<std::uint8_t> far(batch);
    long long consecutive_rejects = 0;
    long long processed = 0;
    const long long cand_cap = 50'000'000;

    while (processed < cand_cap) {
        for (int b = 0; b < batch; ++b)
            cand_rng.next_complex_sphere(cand.data() + static_cast<std::size_t>(b) * n, n);
        // check each candidate against the net as of the batch start
#pragma omp parallel for schedule(static)
        for (int b = 0; b < batch; ++b)
            far[b] =
                min_dist2_to_net(cand.data() + static_cast<std::size_t>(b) * n, net.points, n,
                                 pack2) > pack2;
        // resolve in candidate order (additions within the batch still count)
        const std::size_t batch_start = net.points.size();
        bool stop = false;
        const long long stop_threshold =
            std::max<long long>({20000, static_cast<long long>(coverage_samples),
                                 2 * static_cast<long long>(net.count)});
        for (int b = 0; b < batch && !stop; ++b) {
            ++processed;
            const cplx* c = cand.data() + static_cast<std::size_t>(b) * n;
            bool accept = far[b] != 0;
            if (accept && net.points.size() > batch_start) {
                // also clear the points accepted earlier in this batch
                accept = min_dist2_to_net(c, net.points, n, pack2) > pack2;
            }
            if (accept) {
                net.points.insert(net.points.end(), c, c + n);
                ++net.count;
                consecutive_rejects = 0;
            } else if (++consecutive_rejects >= stop_threshold) {
                stop = true;
            }
        }
        if (stop) break;
    }

    // Uncovered probes are adopted into the net (they are > eps from every
    // net point by definition, so the packing property survives). The repair
    // pass probes twice as hard as the final verification, which then runs
    // on fresh samples and must come back clean.
    for (int attempt = 0; attempt < 2; ++attempt) {
        CounterRng cover_rng(seed, 2 + attempt);
        const int samples_now = attempt == 0 ? 2 * coverage_samples : coverage_samples;
        std::vector<cplx> samples(static_cast<std::size_t>(samples_now) * n);
        for (int s = 0; s < samples_now; ++s)
            cover_rng.next_complex_sphere(samples.data() + static_cast<std::size_t>(s) * n, n);
        std::vector<std::uint8_t> uncovered(samples_now, 0);
#pragma omp parallel for schedule(static)
        for (int s = 0; s < samples_now; ++s)
            uncovered[s] = min_dist2_to_net(samples.data() + static_cast<std::size_t>(s) * n,
                                            net.points, n, eps2) > eps2;
        long long misses = 0;
        for (int s = 0; s < samples_now; ++s) {
            if (!uncovered[s]) continue;
            ++misses;
            if (attempt == 1)
                throw std::runtime_error("build_epsilon_net: coverage failed after retry");
            const cplx* c = samples.data() + static_cast<std::size_t>(s) * n;
            if (min_dist2_to_net(c, net.points, n, eps2) > eps2) {
                net.points.insert(net.points.end(), c, c + n);
                ++net.count;
            }
        }
        if (attempt == 1 && misses == 0) net.coverage_ok = true;
    }

    if (static_cast<double>(net.count) > net.size_bound)
        throw std::logic_error("build_epsilon_net: size " + std::to_string(net.count) +
                               " exceeds the cardinality bound " +
                               std::to_string(net.size_bound));
    return net;
}

NetBoundCheck net_lambda_bound_check(const EpsilonNet& net, const HermitianMatrix& p) {
    const int n = p.n();
    if (n != net.n) throw std::invalid_argument("net_lambda_bound_check: dimension mismatch");
    Spectrum spec = eigen_full(p, false);
    const double rho = spec.spectral_radius();
    if (spec.lambda_min() < -1e-10 * std::max(rho, 1e-300))
        throw std::invalid_argument("net_lambda_bound_check: matrix is not PSD");
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (int i = 0; i < net.count; ++i) {
        const cplx* z = net.point(i);
        cplx q = 0.0;
        for (int r = 0; r < n; ++r) {
            const cplx* row = p.row(r);
            cplx s = 0.0;
            for (int ccol = 0; ccol < n; ++ccol) s += row[ccol] * z[ccol];
            q += std::conj(z[r]) * s;
        }
        best = std::max(best, q.real());
    }
    NetBoundCheck chk;
    chk.lhs = spec.lambda_max();
    chk.rhs = best / (1.0 - 2.0 * net.epsilon);
    chk.ok = chk.lhs <= chk.rhs + 1e-9 * std::max(rho, 1e-300);
    return chk;
}

// ---------------------------------------------------------------------------
// scalar-law checks
// ---------------------------------------------------------------------------
namespace {

struct GaussLegendre {
    std::vector<double> x, w;  // nodes/weights on [-1, 1]
};

GaussLegendre gauss_legendre(int m) {
    GaussLegendre g;
    g.x.resize(m);
    g.w.resize(m);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = m * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        g.x[i] = -z;
        g.x[m - 1 - i] = z;
        g.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        g.w[m - 1 - i] = g.w[i];
    }
    return g;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

// integrate f against the law's density over its (bounded) support
template <typename F>
double quad_expectation(const EntryLaw& law, F&& f) {
    static const GaussLegendre g = gauss_legendre(64);
    const double b = law.bound();
    double total = 0.0;
    if (law.kind() == LawKind::UniformCentered) {
        const double dens = 1.0 / (2.0 * b);
        for (int i = 0; i < 64; ++i) total += g.w[i] * f(b * g.x[i]) * dens * b;
    } else if (law.kind() == LawKind::TruncatedGaussian) {
        const double c = law.cutoff();
        const double sigma = c / b;
        const double z = 2.0 * normal_cdf(c) - 1.0;
        for (int i = 0; i < 64; ++i) {
            double x = b * g.x[i];
            total += g.w[i] * f(x) * (sigma * normal_pdf(sigma * x) / z) * b;
        }
    } else {
        throw std::invalid_argument("quad_expectation: law has unbounded support");
    }
    return total;
}

double mgf_x2(const EntryLaw& law, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("mgf_bound_check: delta must be > 0");
    switch (law.kind()) {
        case LawKind::Rademacher:
            return std::exp(delta);
        case LawKind::GaussianReal:
            if (delta >= 0.5)
                throw std::domain_error("mgf_bound_check: E exp(delta X^2) diverges for the "
                                        "Gaussian law at delta >= 1/2");
            return 1.0 / std::sqrt(1.0 - 2.0 * delta);
        case LawKind::UniformCentered:
        case LawKind::TruncatedGaussian:
            return quad_expectation(law, [&](double x) { return std::exp(delta * x * x); });
        case LawKind::GaussianComplex:
            throw std::invalid_argument("mgf_bound_check: law must be real-valued");
    }
    return 0.0;
}

double mgf_rx(const EntryLaw& law, double r) {
    switch (law.kind()) {
        case LawKind::Rademacher:
            return std::cosh(r);
        case LawKind::GaussianReal:
            return std::exp(0.5 * r * r);
        case LawKind::UniformCentered: {
            if (r == 0.0) return 1.0;
            double a = std::sqrt(3.0) * r;
            return std::sinh(a) / a;
        }
        case LawKind::TruncatedGaussian:
            return quad_expectation(law, [&](double x) { return std::exp(r * x); });
        case LawKind::GaussianComplex:
            throw std::invalid_argument("mgf_bound_check: law must be real-valued");
    }
    return 0.0;
}

}  // namespace

std::vector<MgfRow> mgf_bound_check(const EntryLaw& law, double delta,
                                    std::span<const double> r_grid) {
    const double ex2 = mgf_x2(law, delta);
    std::vector<MgfRow> rows;
    rows.reserve(r_grid.size());
    for (double r : r_grid) {
        MgfRow row;
        row.r = r;
        row.lhs = mgf_rx(law, r);
        row.mid = 1.0 + 3.0 * ex2 * std::expm1(r * r / delta);
        row.outer = std::exp(3.0 * r * r * ex2 / delta);
        row.ok = row.lhs <= row.mid * (1.0 + 1e-12) && row.mid <= row.outer * (1.0 + 1e-12);
        rows.push_back(row);
    }
    return rows;
}

LinearizationConstants linearization_constants(const EntryLaw& law) {
    const double delta = law.subgauss().delta;
    const double K = law.subgauss().K;
    LinearizationConstants c;
    c.tau_real = std::sqrt(delta / (24.0 * K));  // 12 tau^2 K/delta = 1/2 < 1
    c.c_real = 12.0 * K / delta;
    c.tau = c.tau_real / std::sqrt(8.0);
    c.c = 4.0 * c.c_real;
    return c;
}

LinearizationResult gaussian_linearization_check(const EntryLaw& law, int n,
                                                 std::span<const cplx> z, int trials,
                                                 std::uint64_t seed) {
    if (law.is_complex())
        throw std::invalid_argument("linearization_check: law must have real components");
    if (static_cast<int>(z.size()) != n)
        throw std::invalid_argument("linearization_check: z dimension mismatch");
    LinearizationConstants consts = linearization_constants(law);
    double zn2 = 0.0;
    for (const cplx& v : z) zn2 += std::norm(v);
    double zn = std::sqrt(zn2);
    if (zn > consts.tau * (1.0 + 1e-12))
        throw std::invalid_argument("linearization_check: need |z| <= tau = " +
                                    std::to_string(consts.tau) + ", got |z| = " +
                                    std::to_string(zn));

    CounterRng rng(seed, 0);
    long double sum = 0.0, sum2 = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        cplx dot = 0.0;
        for (int i = 0; i < n; ++i) dot += law.sample_real(rng) * std::conj(z[i]);
        double v = std::exp(std::norm(dot));
        sum += v;
        sum2 += static_cast<long double>(v) * v;
    }
    LinearizationResult res;
    res.z_norm = zn;
    res.tau = consts.tau;
    res.c = consts.c;
    res.estimate = static_cast<double>(sum / trials);
    double var = static_cast<double>(sum2 / trials) - res.estimate * res.estimate;
    res.stderr_ = std::sqrt(std::max(0.0, var) / trials);
    res.bound = std::exp(consts.c * zn2);
    res.ok = res.estimate - 4.0 * res.stderr_ <= res.bound;
    return res;
}

// regularized incomplete gamma Q(a,x): series for x < a+1, continued
// fraction otherwise
double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int it = 0; it < 500; ++it) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

double chi_square_tail(int dof, double x) { return gamma_q(0.5 * dof, 0.5 * x); }

}  // namespace bandlab
