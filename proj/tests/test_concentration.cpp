#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bandlab/concentration.hpp"
#include "bandlab/eigen.hpp"
#include "bandlab/stats.hpp"

using namespace bandlab;
using cplx = std::complex<double>;

namespace {

double phi(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

TEST_CASE("wilson intervals bracket the point estimate") {
    auto [lo0, hi0] = wilson_interval(0, 2000);
    CHECK(lo0 == 0.0);
    CHECK(hi0 == doctest::Approx(0.00192).epsilon(0.05));
    auto [lo1, hi1] = wilson_interval(2000, 2000);
    CHECK(hi1 == 1.0);
    auto [lo, hi] = wilson_interval(50, 1000);
    CHECK(lo < 0.05);
    CHECK(hi > 0.05);
}

TEST_CASE("incomplete gamma against closed-form chi-square identities") {
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        CHECK(chi_square_tail(1, x) == doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-12));
        CHECK(chi_square_tail(2, x) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    }
    CHECK(gamma_q(3.0, 0.0) == 1.0);
    CHECK(gamma_q(50.0, 75.0) == doctest::Approx(chi_square_tail(100, 150.0)));
}

TEST_CASE("norm tail experiment") {
    EntryLaw law = EntryLaw::gaussian_real();
    std::vector<double> grid{0.0, 2.1, 3.0};
    TailEstimate est = norm_tail_experiment(law, 50, grid, 400, 31);
    CHECK(est.exceed_prob[0] == 1.0);           // ||X|| > 0 almost surely
    CHECK(est.exceed_prob[2] == 0.0);           // 3 sqrt(N) is deep in the tail
    CHECK(est.exceed_prob[1] <= est.exceed_prob[0]);
    CHECK(est.statistic == "op_norm_over_sqrtN");
    CHECK(est.trials == 400);
    // deterministic
    TailEstimate est2 = norm_tail_experiment(law, 50, grid, 400, 31);
    CHECK(est.exceed_counts == est2.exceed_counts);
    CHECK_THROWS_AS(norm_tail_experiment(law, 50, std::vector<double>{2.0, 1.0}, 10, 0),
                    std::invalid_argument);
}

TEST_CASE("quadratic form tail against the chi-square oracle") {
    const int n = 100;
    std::vector<cplx> z(n, cplx(0.0));
    z[0] = 1.0;
    std::vector<double> grid{1.5, 2.0, 3.0};
    TailEstimate est = quadratic_form_tail(EntryLaw::gaussian_real(), n, z, grid, 4000, 77);
    // ||X e1||^2 ~ chi-square(n) exactly
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double oracle = chi_square_tail(n, n * grid[i]);
        CAPTURE(grid[i]);
        CHECK(oracle >= est.lo95[i]);
        CHECK(oracle <= est.hi95[i]);
    }
    SUBCASE("z = 0 never exceeds positive thresholds") {
        std::vector<cplx> zero(n, cplx(0.0));
        TailEstimate e0 = quadratic_form_tail(EntryLaw::gaussian_real(), n, zero,
                                              std::vector<double>{0.5, 1.0}, 50, 3);
        CHECK(e0.exceed_prob[0] == 0.0);
        CHECK(e0.exceed_prob[1] == 0.0);
    }
    SUBCASE("|z| > 1 is rejected") {
        std::vector<cplx> big(n, cplx(1.0));
        CHECK_THROWS_AS(
            quadratic_form_tail(EntryLaw::gaussian_real(), n, big, grid, 10, 0),
            std::invalid_argument);
    }
}

TEST_CASE("rho_L tail experiment") {
    SUBCASE("L=1 rademacher diagonal: rho_1 = 1 always") {
        SparsityPattern pat = SparsityPattern::cyclic_band(40, 1);
        // t sqrt(ln 40) crosses 1 between t=0.5 and t=0.52...
        std::vector<double> grid{0.2, 0.9};
        TailEstimate est = rhoL_tail_experiment(EntryLaw::rademacher(), pat, 1, grid, 60, 5);
        CHECK(est.exceed_prob[0] == 1.0);  // 0.2 sqrt(ln 40) = 0.38 < 1
        CHECK(est.exceed_prob[1] == 0.0);  // 0.9 sqrt(ln 40) = 1.73 > 1
    }
    SUBCASE("gaussian n=12 L=3: zero exceedance far out") {
        SparsityPattern pat = SparsityPattern::full(12);
        std::vector<double> grid{6.0};
        TailEstimate est =
            rhoL_tail_experiment(EntryLaw::gaussian_real(), pat, 3, grid, 100, 17);
        CHECK(est.exceed_prob[0] == 0.0);
        CHECK(est.L == 3);
        CHECK_FALSE(est.search_mode);
    }
}

TEST_CASE("epsilon net construction") {
    SUBCASE("circle: size between covering and packing limits") {
        EpsilonNet net = build_epsilon_net(1, 0.2, 11, 20000);
        CHECK(net.coverage_ok);
        CHECK(net.count >= 16);   // coverage needs >= 2pi/(2*0.2003)
        CHECK(net.count <= 33);   // separation allows <= 2pi/(0.97*0.2003)
        CHECK(net.size_bound == doctest::Approx(100.0));
        // pairwise separation at the packing radius
        for (int i = 0; i < net.count; ++i)
            for (int j = i + 1; j < net.count; ++j) {
                double d = std::abs(*net.point(i) - *net.point(j));
                CHECK(d > 0.97 * 0.2);
            }
    }
    SUBCASE("n=2 against the lemma bound") {
        EpsilonNet net = build_epsilon_net(2, 0.2, 12, 20000);
        CHECK(net.coverage_ok);
        CHECK(static_cast<double>(net.count) <= 1e4);
    }
    SUBCASE("domain guards") {
        CHECK_THROWS_AS(build_epsilon_net(5, 0.2, 0, 10), std::invalid_argument);
        CHECK_THROWS_AS(build_epsilon_net(2, 0.3, 0, 10), std::invalid_argument);
        CHECK_THROWS_AS(build_epsilon_net(2, 0.0, 0, 10), std::invalid_argument);
    }
}

TEST_CASE("net certifies lambda_max of PSD matrices") {
    EpsilonNet net = build_epsilon_net(2, 0.1, 21, 20000);
    SUBCASE("identity") {
        HermitianMatrix id = HermitianMatrix::from_dense(
            SparsityPattern::full(2), {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)});
        NetBoundCheck chk = net_lambda_bound_check(net, id);
        CHECK(chk.lhs == doctest::Approx(1.0));
        CHECK(chk.rhs == doctest::Approx(1.25).epsilon(1e-3));
        CHECK(chk.ok);
    }
    SUBCASE("zero matrix") {
        HermitianMatrix z = HermitianMatrix::from_dense(
            SparsityPattern::full(2), std::vector<cplx>(4, cplx(0.0)));
        NetBoundCheck chk = net_lambda_bound_check(net, z);
        CHECK(chk.lhs == 0.0);
        CHECK(chk.ok);
    }
    SUBCASE("non-PSD input is rejected") {
        HermitianMatrix m = HermitianMatrix::from_dense(
            SparsityPattern::full(2), {cplx(1.0), cplx(0.0), cplx(0.0), cplx(-1.0)});
        CHECK_THROWS_AS(net_lambda_bound_check(net, m), std::invalid_argument);
    }
    SUBCASE("random PSD corpus") {
        EpsilonNet net3 = build_epsilon_net(3, 0.2, 31, 20000);
        SparsityPattern full = SparsityPattern::full(3);
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            HermitianMatrix x = HermitianMatrix::sample(EntryLaw::gaussian_complex(), full, seed);
            std::vector<cplx> sq(9);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    cplx s = 0.0;
                    for (int t = 0; t < 3; ++t) s += x(i, t) * x(t, j);
                    sq[static_cast<std::size_t>(i) * 3 + j] = s;
                }
            for (int i = 0; i < 3; ++i) {
                sq[static_cast<std::size_t>(i) * 3 + i] = sq[static_cast<std::size_t>(i) * 3 + i].real();
                for (int j = i + 1; j < 3; ++j) {
                    cplx m = 0.5 * (sq[static_cast<std::size_t>(i) * 3 + j] +
                                    std::conj(sq[static_cast<std::size_t>(j) * 3 + i]));
                    sq[static_cast<std::size_t>(i) * 3 + j] = m;
                    sq[static_cast<std::size_t>(j) * 3 + i] = std::conj(m);
                }
            }
            HermitianMatrix p = HermitianMatrix::from_dense(full, std::move(sq));
            CAPTURE(seed);
            CHECK(net_lambda_bound_check(net3, p).ok);
        }
    }
}

TEST_CASE("mgf chain lhs <= mid <= outer") {
    SUBCASE("rademacher closed forms at delta = 1") {
        std::vector<double> grid{-3, -2, -1, 0, 1, 2, 3};
        auto rows = mgf_bound_check(EntryLaw::rademacher(), 1.0, grid);
        for (const MgfRow& r : rows) CHECK(r.ok);
        // spot values at r = 1: cosh(1) and 1 + 3e(e-1)
        const MgfRow& r1 = rows[4];
        CHECK(r1.lhs == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
        CHECK(r1.mid ==
              doctest::Approx(1.0 + 3.0 * std::exp(1.0) * (std::exp(1.0) - 1.0)).epsilon(1e-12));
        // r = 0 is an exact equality chain
        const MgfRow& r0 = rows[3];
        CHECK(r0.lhs == 1.0);
        CHECK(r0.mid == 1.0);
        CHECK(r0.outer == 1.0);
    }
    SUBCASE("gaussian at delta = 1/4") {
        std::vector<double> grid{-3, -2, -1, 0, 1, 2, 3};
        auto rows = mgf_bound_check(EntryLaw::gaussian_real(), 0.25, grid);
        for (const MgfRow& r : rows) CHECK(r.ok);
        const MgfRow& r2 = rows[5];
        CHECK(r2.lhs == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
        CHECK(r2.mid ==
              doctest::Approx(1.0 + 3.0 * std::sqrt(2.0) * (std::exp(16.0) - 1.0)).epsilon(1e-12));
    }
    SUBCASE("bounded laws through quadrature") {
        std::vector<double> grid{-2, -0.5, 0, 0.5, 2};
        for (const MgfRow& r : mgf_bound_check(EntryLaw::uniform_centered(), 1.0, grid))
            CHECK(r.ok);
        for (const MgfRow& r : mgf_bound_check(EntryLaw::truncated_gaussian(2.0), 0.8, grid))
            CHECK(r.ok);
    }
    SUBCASE("quadrature agrees with the truncated-gaussian closed form") {
        EntryLaw law = EntryLaw::truncated_gaussian(2.0);
        const double c = 2.0, sigma = c / law.bound();
        std::vector<double> grid{0.7};
        auto rows = mgf_bound_check(law, 0.5, grid);
        double s = 0.7 / sigma;
        double exact =
            std::exp(0.5 * s * s) * (phi(c - s) - phi(-c - s)) / (2.0 * phi(c) - 1.0);
        CHECK(rows[0].lhs == doctest::Approx(exact).epsilon(1e-10));
    }
    SUBCASE("divergent delta rejected for gaussian") {
        CHECK_THROWS_AS(mgf_bound_check(EntryLaw::gaussian_real(), 0.5, std::vector<double>{1.0}),
                        std::domain_error);
    }
    SUBCASE("complex law rejected") {
        CHECK_THROWS_AS(mgf_bound_check(EntryLaw::gaussian_complex(), 0.5, std::vector<double>{1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("linearization of |Y.z|^2") {
    EntryLaw law = EntryLaw::rademacher();
    LinearizationConstants consts = linearization_constants(law);
    // recipe: 12 tau_R^2 K / delta = 1/2, complex reduction by sqrt(8)
    CHECK(12.0 * consts.tau_real * consts.tau_real * law.subgauss().K / law.subgauss().delta ==
          doctest::Approx(0.5));
    CHECK(consts.tau == doctest::Approx(consts.tau_real / std::sqrt(8.0)));
    CHECK(consts.c == doctest::Approx(48.0 * law.subgauss().K / law.subgauss().delta));

    SUBCASE("z = 0 gives the exact value 1 on both sides") {
        std::vector<cplx> z(4, cplx(0.0));
        LinearizationResult res = gaussian_linearization_check(law, 4, z, 1000, 5);
        CHECK(res.estimate == 1.0);
        CHECK(res.bound == 1.0);
        CHECK(res.ok);
    }
    SUBCASE("rademacher at |z| = tau/2") {
        std::vector<cplx> z(4, cplx(0.0));
        for (int i = 0; i < 4; ++i) z[i] = consts.tau / 2.0 / 2.0;  // |z| = tau/2
        LinearizationResult res = gaussian_linearization_check(law, 4, z, 100000, 6);
        CHECK(res.ok);
        CHECK(res.estimate >= 1.0);
        CHECK(res.estimate <= res.bound);
    }
    SUBCASE("z = tau e1: closed form exp(tau^2) for rademacher components") {
        std::vector<cplx> z(4, cplx(0.0));
        z[0] = consts.tau;
        LinearizationResult res = gaussian_linearization_check(law, 4, z, 2000, 7);
        CHECK(res.estimate == doctest::Approx(std::exp(consts.tau * consts.tau)).epsilon(1e-12));
        CHECK(res.stderr_ == doctest::Approx(0.0));
        CHECK(res.ok);
    }
    SUBCASE("|z| beyond tau is rejected naming tau") {
        std::vector<cplx> z(4, cplx(0.0));
        z[0] = consts.tau * 1.5;
        CHECK_THROWS_WITH_AS(gaussian_linearization_check(law, 4, z, 10, 0),
                             doctest::Contains("tau"), std::invalid_argument);
    }
}

TEST_CASE("tail estimates are monotone in the threshold by construction") {
    EntryLaw law = EntryLaw::gaussian_real();
    std::vector<double> grid{1.0, 1.5, 2.0, 2.5};
    TailEstimate est = norm_tail_experiment(law, 30, grid, 200, 4);
    for (std::size_t i = 1; i < est.exceed_prob.size(); ++i)
        CHECK(est.exceed_prob[i] <= est.exceed_prob[i - 1]);
}
