#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "bandlab/ensemble.hpp"
#include "bandlab/reference.hpp"

using namespace bandlab;
using cplx = std::complex<double>;

TEST_CASE("entry laws are centered with unit variance and in-bound moments") {
    for (const EntryLaw& law :
         {EntryLaw::gaussian_real(), EntryLaw::gaussian_complex(), EntryLaw::rademacher(),
          EntryLaw::uniform_centered(), EntryLaw::truncated_gaussian(2.0)}) {
        CAPTURE(law.name());
        HypothesesReport rep =
            validate_hypotheses(law, SparsityPattern::full(4), 100000, 0xABCDEF);
        CHECK(rep.mean_ok);
        CHECK(rep.variance_ok);
        for (std::size_t k = 0; k < rep.moment_ok.size(); ++k) {
            CAPTURE(k + 1);
            CHECK(rep.moment_ok[k]);
        }
    }
}

TEST_CASE("rademacher draws have magnitude exactly one") {
    EntryLaw law = EntryLaw::rademacher();
    CounterRng rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        cplx x = law.sample(rng);
        CHECK(std::abs(x) == 1.0);
        CHECK(x.imag() == 0.0);
    }
}

TEST_CASE("gaussian sample mean vanishes at scale") {
    EntryLaw law = EntryLaw::gaussian_real();
    CounterRng rng(17, 0);
    double s = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) s += law.sample(rng).real();
    CHECK(std::abs(s / n) < 0.005);
}

TEST_CASE("uniform law is supported on [-sqrt3, sqrt3]") {
    EntryLaw law = EntryLaw::uniform_centered();
    CounterRng rng(3, 0);
    const double b = std::sqrt(3.0);
    for (int i = 0; i < 100000; ++i) {
        double x = law.sample(rng).real();
        CHECK(x >= -b);
        CHECK(x <= b);
    }
}

TEST_CASE("truncated gaussian respects its bound and unit variance") {
    EntryLaw law = EntryLaw::truncated_gaussian(1.5);
    CounterRng rng(11, 0);
    double s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = law.sample(rng).real();
        CHECK(std::abs(x) <= law.bound() * (1 + 1e-12));
        s2 += x * x;
    }
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("complex gaussian has E|X|^2 = 1 with balanced components") {
    EntryLaw law = EntryLaw::gaussian_complex();
    CounterRng rng(19, 0);
    double m2 = 0, re2 = 0, im2 = 0, cross = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        cplx x = law.sample(rng);
        m2 += std::norm(x);
        re2 += x.real() * x.real();
        im2 += x.imag() * x.imag();
        cross += x.real() * x.imag();
    }
    CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(cross / n) < 0.01);
}

TEST_CASE("pattern construction and row counts") {
    SUBCASE("cyclic band has exactly W per row") {
        SparsityPattern p = SparsityPattern::cyclic_band(10, 5);
        for (int c : p.row_counts()) CHECK(c == 5);
    }
    SUBCASE("standard band n=10 w=5 edge rows") {
        SparsityPattern p = SparsityPattern::standard_band(10, 5);
        auto rc = p.row_counts();
        CHECK(rc[0] == 3);
        CHECK(rc[1] == 4);
        for (int i = 2; i <= 7; ++i) CHECK(rc[i] == 5);
        CHECK(rc[8] == 4);
        CHECK(rc[9] == 3);
    }
    SUBCASE("full pattern allows everything") {
        SparsityPattern p = SparsityPattern::full(6);
        int count = 0;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) count += p.allowed(i, j);
        CHECK(count == 36);
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(SparsityPattern::standard_band(10, 4), std::invalid_argument);
        CHECK_THROWS_AS(SparsityPattern::cyclic_band(10, 11), std::invalid_argument);
        CHECK_THROWS_AS(SparsityPattern::build(PatternKind::Full, 10, 6), std::invalid_argument);
        std::vector<std::uint8_t> bad(9, 0);
        bad[1] = 1;  // (0,1) without (1,0)
        CHECK_THROWS_AS(SparsityPattern::custom(3, bad, 2), std::invalid_argument);
    }
    SUBCASE("pattern symmetry") {
        for (auto p : {SparsityPattern::standard_band(11, 5), SparsityPattern::cyclic_band(11, 5)})
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) CHECK(p.allowed(i, j) == p.allowed(j, i));
    }
}

TEST_CASE("sampled matrices are Hermitian with pattern support") {
    EntryLaw law = EntryLaw::gaussian_complex();
    SparsityPattern pat = SparsityPattern::cyclic_band(24, 7);
    HermitianMatrix h = HermitianMatrix::sample(law, pat, 99);
    for (int i = 0; i < 24; ++i) {
        CHECK(h(i, i).imag() == 0.0);
        for (int j = 0; j < 24; ++j) {
            CHECK(h(i, j) == std::conj(h(j, i)));
            if (!pat.allowed(i, j)) CHECK(h(i, j) == cplx(0.0));
        }
    }
}

TEST_CASE("zero-allowed mask gives the zero matrix") {
    std::vector<std::uint8_t> mask(16, 0);
    SparsityPattern pat = SparsityPattern::custom(4, mask, 1);
    HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_real(), pat, 1);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(h(i, j) == cplx(0.0));
}

TEST_CASE("rademacher full 2x2 is a symmetric sign matrix") {
    HermitianMatrix h =
        HermitianMatrix::sample(EntryLaw::rademacher(), SparsityPattern::full(2), 4);
    CHECK(std::abs(h(0, 0).real()) == 1.0);
    CHECK(std::abs(h(0, 1).real()) == 1.0);
    CHECK(h(0, 1) == h(1, 0));
}

TEST_CASE("frobenius mass matches the allowed entry count at scale") {
    // sum over N*W variance-one entries
    SparsityPattern pat = SparsityPattern::cyclic_band(1000, 101);
    HermitianMatrix h = HermitianMatrix::sample(EntryLaw::gaussian_real(), pat, 2024);
    double per_entry = h.frobenius_norm2() / (1000.0 * 101.0);
    CHECK(per_entry == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampling is bit-reproducible and matches the serial reference") {
    EntryLaw law = EntryLaw::gaussian_complex();
    SparsityPattern pat = SparsityPattern::standard_band(40, 9);
    HermitianMatrix a = HermitianMatrix::sample(law, pat, 777);
    HermitianMatrix b = HermitianMatrix::sample(law, pat, 777);
    HermitianMatrix c = ref::sample_matrix(law, pat, 777);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            CHECK(a(i, j) == b(i, j));
            CHECK(a(i, j) == c(i, j));
        }
}

TEST_CASE("row-count validation flags violations") {
    SUBCASE("cyclic band: all rows full") {
        HypothesesReport rep = validate_hypotheses(
            EntryLaw::gaussian_real(), SparsityPattern::cyclic_band(100, 11), 1000, 5);
        CHECK(rep.fraction_full_rows == 1.0);
        CHECK(rep.row_counts_ok);
    }
    SUBCASE("standard band n=100 w=11: 90% full") {
        HypothesesReport rep = validate_hypotheses(
            EntryLaw::gaussian_real(), SparsityPattern::standard_band(100, 11), 1000, 5);
        CHECK(rep.fraction_full_rows == doctest::Approx(0.90));
        CHECK(rep.row_counts_ok);
    }
    SUBCASE("custom mask with an overfull row fails") {
        const int n = 6;
        std::vector<std::uint8_t> mask(n * n, 0);
        for (int j = 0; j < 4; ++j) {
            mask[0 * n + j] = 1;
            mask[j * n + 0] = 1;
        }
        SparsityPattern pat = SparsityPattern::custom(n, std::move(mask), 3);
        HypothesesReport rep =
            validate_hypotheses(EntryLaw::gaussian_real(), pat, 1000, 5);
        CHECK_FALSE(rep.row_counts_ok);
        CHECK_FALSE(rep.ok());
    }
}

TEST_CASE("matrix csv export lists stored entries") {
    HermitianMatrix h =
        HermitianMatrix::sample(EntryLaw::rademacher(), SparsityPattern::full(3), 8);
    std::ostringstream os;
    h.write_csv(os);
    std::string text = os.str();
    CHECK(text.rfind("row,col,re,im\n", 0) == 0);
    // header + 9 entries
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}
