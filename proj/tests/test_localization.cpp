#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bandlab/localization.hpp"

using namespace bandlab;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> unit_uniform(int n) {
    return std::vector<cplx>(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

std::vector<cplx> random_unit(int n, CounterRng& rng) {
    std::vector<cplx> v(n);
    rng.next_complex_sphere(v.data(), n);
    return v;
}

// independent oracle: smallest L such that SOME size-L subset carries
// >= 1 - eta of the mass, by scanning all subsets
int brute_force_loc_length(const std::vector<cplx>& v, double eta) {
    const int n = static_cast<int>(v.size());
    std::vector<double> w2(n);
    for (int i = 0; i < n; ++i) w2[i] = std::norm(v[i]);
    double total = 0.0;
    for (double x : w2) total += x;
    for (int L = 1; L <= n; ++L) {
        double best_mass = -1.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) != L) continue;
            double mass = 0.0;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) mass += w2[i];
            best_mass = std::max(best_mass, mass);
        }
        double tail = total - best_mass;
        if (tail <= eta + 1e-12 * (1.0 + eta)) return L;
    }
    return n;
}

HermitianMatrix diag_matrix(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    std::vector<cplx> a(static_cast<std::size_t>(n) * n, cplx(0.0));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] = d[i];
    return HermitianMatrix::from_dense(SparsityPattern::full(n), std::move(a));
}

}  // namespace

TEST_CASE("is_localized on hand-checked vectors") {
    std::vector<cplx> e1(5, cplx(0.0));
    e1[0] = 1.0;
    CHECK(is_localized(e1, 1, 0.0));

    auto u = unit_uniform(10);
    CHECK_FALSE(is_localized(u, 5, 0.4));  // tail 0.5 > 0.4
    CHECK(is_localized(u, 5, 0.5));        // tail exactly 0.5

    CHECK_THROWS_AS(is_localized(u, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(is_localized(u, 11, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(is_localized(u, 2, 1.0), std::invalid_argument);
    std::vector<cplx> not_unit(4, cplx(0.4, 0.0));
    CHECK_THROWS_AS(is_localized(not_unit, 2, 0.1), std::invalid_argument);
}

TEST_CASE("loc_length equal-mass arithmetic") {
    std::vector<cplx> e1(7, cplx(0.0));
    e1[0] = 1.0;
    CHECK(loc_length(e1, 0.0) == 1);
    CHECK(loc_length(e1, 0.9) == 1);

    auto u = unit_uniform(10);
    CHECK(loc_length(u, 0.25) == 8);  // ceil(10 * 0.75)
    CHECK(loc_length(u, 0.5) == 5);   // exactly N(1-eta)

    std::vector<cplx> two{cplx(std::sqrt(0.9), 0.0), cplx(std::sqrt(0.1), 0.0)};
    CHECK(loc_length(two, 0.1) == 1);
}

TEST_CASE("sorted-prefix optimality against subset brute force") {
    CounterRng rng(2718, 0);
    for (int rep = 0; rep < 300; ++rep) {
        int n = 2 + static_cast<int>(rng.next_u64() % 9);  // 2..10
        auto v = random_unit(n, rng);
        double eta = 0.6 * rng.next_double();
        CAPTURE(rep);
        CHECK(loc_length(v, eta) == brute_force_loc_length(v, eta));
    }
}

TEST_CASE("loc_length invariances: permutation and global phase") {
    CounterRng rng(5, 0);
    auto v = random_unit(9, rng);
    int base = loc_length(v, 0.3);
    auto p = v;
    std::rotate(p.begin(), p.begin() + 4, p.end());
    CHECK(loc_length(p, 0.3) == base);
    auto ph = v;
    cplx phase = std::polar(1.0, 1.234);
    for (auto& x : ph) x *= phase;
    CHECK(loc_length(ph, 0.3) == base);
}

TEST_CASE("loc_length minimality invariant") {
    CounterRng rng(77, 0);
    for (int rep = 0; rep < 100; ++rep) {
        auto v = random_unit(12, rng);
        double eta = 0.5 * rng.next_double();
        int L = loc_length(v, eta);
        CHECK(tail_mass_top_L(v, L) <= eta + 1e-11);
        if (L > 1) CHECK(tail_mass_top_L(v, L - 1) > eta);
    }
}

TEST_CASE("rho_L exhaustive on hand-checked matrices") {
    HermitianMatrix d = diag_matrix({3.0, 1.0, -2.0});
    CHECK(rho_L_exhaustive(d, 1) == doctest::Approx(3.0));
    CHECK(rho_L_exhaustive(d, 2) == doctest::Approx(3.0));
    CHECK(rho_L_exhaustive(d, 3) == doctest::Approx(3.0));

    HermitianMatrix swap = HermitianMatrix::from_dense(
        SparsityPattern::full(2), {cplx(0.0), cplx(1.0), cplx(1.0), cplx(0.0)});
    CHECK(rho_L_exhaustive(swap, 1) == doctest::Approx(0.0));
    CHECK(rho_L_exhaustive(swap, 2) == doctest::Approx(1.0));
}

TEST_CASE("rho_L budget guard") {
    HermitianMatrix h =
        HermitianMatrix::sample(EntryLaw::gaussian_real(), SparsityPattern::full(30), 1);
    CHECK_THROWS_WITH_AS(rho_L_exhaustive(h, 15), doctest::Contains("rho_L_search"),
                         std::invalid_argument);
}

TEST_CASE("rho_L monotone in L up to the spectral radius") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_complex(),
                                                    SparsityPattern::full(10), seed);
        double prev = 0.0;
        for (int L = 1; L <= 10; ++L) {
            double r = rho_L_exhaustive(h, L);
            CHECK(r >= prev);
            prev = r;
        }
        Spectrum s = eigen_full(h, false);
        CHECK(prev == doctest::Approx(s.spectral_radius()).epsilon(1e-12));
    }
}

TEST_CASE("rho_L_search") {
    SUBCASE("L = n is exact") {
        HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_real(),
                                                    SparsityPattern::full(12), 9);
        CounterRng rng(4, 0);
        CHECK(rho_L_search(h, 12, 1, 10, rng) ==
              doctest::Approx(rho_L_exhaustive(h, 12)).epsilon(1e-12));
    }
    SUBCASE("diagonal matrices are found by single swaps") {
        HermitianMatrix d = diag_matrix({0.3, -4.0, 1.0, 2.5, -1.0, 0.9});
        CounterRng rng(8, 0);
        CHECK(rho_L_search(d, 2, 3, 200, rng) == doctest::Approx(4.0));
    }
    SUBCASE("matches exhaustive with a generous budget") {
        for (std::uint64_t seed : {21u, 22u, 23u}) {
            HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_real(),
                                                        SparsityPattern::full(10), seed);
            CounterRng rng(seed, 5);
            double found = rho_L_search(h, 3, 12, 5000, rng);
            double exact = rho_L_exhaustive(h, 3);
            CHECK(found <= exact + 1e-12);
            CHECK(found == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("lemma bound: |lambda| sqrt(1-eta) <= rho_L + sqrt(eta) rho") {
    SUBCASE("diagonal matrices saturate through rho_L") {
        HermitianMatrix d = diag_matrix({3.0, 1.0, -2.0, 0.5});
        Spectrum s = eigen_full(d, true);
        double rho = s.spectral_radius();
        for (int L = 1; L <= 4; ++L) {
            auto rows = lemma_bound_check(s, L, rho_L_exhaustive(d, L), rho);
            for (const auto& r : rows) {
                CHECK(r.ok);
                CHECK(r.eta == doctest::Approx(0.0));
            }
        }
    }
    SUBCASE("L = n has eta = 0 and reduces to |lambda| <= rho") {
        HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_complex(),
                                                    SparsityPattern::full(8), 55);
        Spectrum s = eigen_full(h, true);
        auto rows = lemma_bound_check(s, 8, rho_L_exhaustive(h, 8), s.spectral_radius());
        for (const auto& r : rows) {
            CHECK(r.ok);
            CHECK(r.eta <= 1e-12);
        }
    }
    SUBCASE("zero violations on seeded gaussian corpus") {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_complex(),
                                                        SparsityPattern::full(10), seed);
            Spectrum s = eigen_full(h, true);
            double rho = s.spectral_radius();
            for (int L : {1, 2, 3}) {
                auto rows = lemma_bound_check(s, L, rho_L_exhaustive(h, L), rho);
                for (const auto& r : rows) {
                    CAPTURE(seed);
                    CAPTURE(L);
                    CHECK(r.ok);
                }
            }
        }
    }
}

TEST_CASE("delocalization experiment") {
    SUBCASE("parameter domain mirrors the theorem hypothesis") {
        CHECK_THROWS_WITH_AS(
            delocalization_experiment(EntryLaw::rademacher(), PatternKind::CyclicBand, 16, 1, 1,
                                      0.4, 0.5, 1, 0),
            doctest::Contains("kappa"), std::invalid_argument);
    }
    SUBCASE("diagonal rademacher: empty window, zero violations") {
        auto res = delocalization_experiment(EntryLaw::rademacher(), PatternKind::CyclicBand, 64,
                                             1, 1, 0.1, 0.9, 2, 5);
        CHECK(res.windowed == 0);
        CHECK(res.localized_in_window == 0);
        REQUIRE(res.rows.size() == 128);
        // every eigenvector of a diagonal matrix is 1-localized
        for (const auto& r : res.rows) {
            CHECK(r.loc_len_eta10 == 1);
            CHECK(r.localized);
        }
    }
    SUBCASE("gaussian band: windowed eigenvectors are delocalized") {
        auto res = delocalization_experiment(EntryLaw::gaussian_real(), PatternKind::CyclicBand,
                                             128, 17, 4, 0.1, 0.9, 2, 11);
        CHECK(res.windowed >= 0);
        CHECK(res.localized_in_window == 0);
        auto res2 = delocalization_experiment(EntryLaw::gaussian_real(), PatternKind::CyclicBand,
                                              128, 17, 4, 0.1, 0.9, 2, 11);
        REQUIRE(res.rows.size() == res2.rows.size());
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            CHECK(res.rows[i].lambda == res2.rows[i].lambda);
            CHECK(res.rows[i].eta_at_L == res2.rows[i].eta_at_L);
        }
    }
}
