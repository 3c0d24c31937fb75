#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "bandlab/walks.hpp"

using namespace bandlab;

namespace {

// independent census oracle: enumerate raw tuples over {1..2k}^{2k}, filter
// closed walks with every edge visited twice, dedup by canonical form
std::set<std::vector<int>> brute_force_census(int k) {
    const int len = 2 * k;
    std::set<std::vector<int>> words;
    std::vector<int> tuple(len, 1);
    while (true) {
        std::vector<int> w = canonical_walk(tuple);
        std::map<std::pair<int, int>, int> mult;
        for (int i = 0; i < len; ++i) {
            int a = w[i], b = w[(i + 1) % len];
            if (a > b) std::swap(a, b);
            ++mult[{a, b}];
        }
        bool all_twice = true;
        for (const auto& [e, c] : mult) all_twice = all_twice && c >= 2;
        if (all_twice) words.insert(w);
        int pos = len - 1;
        while (pos >= 0 && tuple[pos] == len) tuple[pos--] = 1;
        if (pos < 0) break;
        ++tuple[pos];
    }
    return words;
}

}  // namespace

TEST_CASE("canonical relabeling") {
    CHECK(canonical_walk(std::vector<int>{7, 3, 7, 3}) == std::vector<int>{1, 2, 1, 2});
    CHECK(canonical_walk(std::vector<int>{5, 5}) == std::vector<int>{1, 1});
    CHECK(canonical_walk(std::vector<int>{2, 9, 2, 9}) ==
          canonical_walk(std::vector<int>{4, 1, 4, 1}));
    CHECK_THROWS_AS(canonical_walk(std::vector<int>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("census at k=1: one loop class, one edge class") {
    auto classes = enumerate_classes(1);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].word == std::vector<int>{1, 1});
    CHECK(classes[0].t == 1);
    CHECK(classes[0].l == 1);
    CHECK(classes[0].m == 0);
    CHECK(classes[1].word == std::vector<int>{1, 2});
    CHECK(classes[1].t == 2);
    CHECK(classes[1].l == 1);
    CHECK(classes[1].m == 0);
}

TEST_CASE("enumerator agrees with the raw-tuple oracle for k <= 3") {
    for (int k = 1; k <= 3; ++k) {
        CAPTURE(k);
        auto oracle = brute_force_census(k);
        auto classes = enumerate_classes(k);
        CHECK(classes.size() == oracle.size());
        for (const WalkClass& c : classes) CHECK(oracle.count(c.word) == 1);
    }
}

TEST_CASE("per-t class counts (frozen from the raw-tuple oracle)") {
    auto per_t = [](int k) {
        std::map<int, long long> m;
        for (const WalkClass& c : enumerate_classes(k)) ++m[c.t];
        return m;
    };
    CHECK(per_t(1) == std::map<int, long long>{{1, 1}, {2, 1}});
    CHECK(per_t(2) == std::map<int, long long>{{1, 1}, {2, 5}, {3, 2}});
    CHECK(per_t(3) == std::map<int, long long>{{1, 1}, {2, 19}, {3, 25}, {4, 5}});
    CHECK(per_t(4) == std::map<int, long long>{{1, 1}, {2, 75}, {3, 226}, {4, 121}, {5, 14}});
}

TEST_CASE("emitted classes are canonical fixed points and within t <= k+1") {
    for (int k = 1; k <= 4; ++k) {
        for (const WalkClass& c : enumerate_classes(k)) {
            CHECK(canonical_walk(c.word) == c.word);
            CHECK(c.t <= k + 1);
            CHECK(c.l + c.m == static_cast<int>(c.edge_multiplicities.size()));
        }
    }
}

TEST_CASE("the k limit guards the state space") {
    CHECK_THROWS_AS(enumerate_classes(6), std::invalid_argument);
    CHECK_NOTHROW(enumerate_classes(4));
}

TEST_CASE("walk inequalities hold exhaustively") {
    SUBCASE("hand evaluation at k=1") {
        auto classes = enumerate_classes(1);
        // (1,2): 2l+3m = 2 <= 2 and 2k-2l = 0 <= 6(k-t+1) = 0
        CHECK(2 * classes[1].l + 3 * classes[1].m <= 2);
        CHECK(2 - 2 * classes[1].l <= 6 * (1 - classes[1].t + 1));
        // (1,1): 2k-2l = 0 <= 6(1-1+1) = 6
        CHECK(2 - 2 * classes[0].l <= 6 * (1 - classes[0].t + 1));
    }
    for (int k = 1; k <= 4; ++k) {
        WalkInequalityReport rep = verify_fk_inequalities(k);
        CAPTURE(k);
        CHECK(rep.ok);
        CHECK(rep.classes_checked > 0);
    }
}

TEST_CASE("class counts sit below 4^k (2k)^(6(k-t+1))") {
    SUBCASE("k=1 arithmetic") {
        auto rows = count_bound_check(1);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].t == 1);
        CHECK(rows[0].count == 1);
        CHECK(rows[0].bound == doctest::Approx(4.0 * 64.0));  // 4 * 2^6
        CHECK(rows[0].ok);
        CHECK(rows[1].t == 2);
        CHECK(rows[1].count == 1);
        CHECK(rows[1].bound == doctest::Approx(4.0));
        CHECK(rows[1].ok);
    }
    for (int k = 1; k <= 4; ++k)
        for (const CountBoundRow& r : count_bound_check(k)) {
            CAPTURE(k);
            CAPTURE(r.t);
            CHECK(r.ok);
        }
}

TEST_CASE("trace moment monte carlo") {
    SUBCASE("rademacher k=1 is deterministic: Tr X^2 = #allowed entries") {
        SparsityPattern pat = SparsityPattern::cyclic_band(100, 11);
        TraceMomentEstimate est = trace_moment_mc(EntryLaw::rademacher(), pat, 1, 50, 4);
        CHECK(est.estimate == doctest::Approx(1100.0).epsilon(1e-14));
        CHECK(est.stderr_ == 0.0);
    }
    SUBCASE("gaussian k=1 matches the variance sum within 4 stderr") {
        SparsityPattern pat = SparsityPattern::cyclic_band(100, 11);
        TraceMomentEstimate est = trace_moment_mc(EntryLaw::gaussian_real(), pat, 1, 400, 4);
        CHECK(std::abs(est.estimate - 1100.0) <= 4.0 * est.stderr_);
    }
    SUBCASE("n=2 full rademacher k=2 against the exhaustive sign oracle") {
        // E Tr X^4 over all 2^3 symmetric sign matrices
        double exact = 0.0;
        for (int bits = 0; bits < 8; ++bits) {
            double a = (bits & 1) ? 1.0 : -1.0;
            double b = (bits & 2) ? 1.0 : -1.0;
            double c = (bits & 4) ? 1.0 : -1.0;
            double x2[4] = {a * a + b * b, b * (a + c), b * (a + c), b * b + c * c};
            exact += x2[0] * x2[0] + 2.0 * x2[1] * x2[1] + x2[3] * x2[3];
        }
        exact /= 8.0;
        CHECK(exact == doctest::Approx(12.0));
        SparsityPattern pat = SparsityPattern::full(2);
        TraceMomentEstimate est = trace_moment_mc(EntryLaw::rademacher(), pat, 2, 4000, 9);
        CHECK(std::abs(est.estimate - exact) <= 4.0 * est.stderr_);
    }
    SUBCASE("zero mask gives zero") {
        std::vector<std::uint8_t> mask(16, 0);
        SparsityPattern pat = SparsityPattern::custom(4, std::move(mask), 1);
        TraceMomentEstimate est = trace_moment_mc(EntryLaw::gaussian_real(), pat, 2, 10, 0);
        CHECK(est.estimate == 0.0);
    }
}

TEST_CASE("trace moment bound") {
    SUBCASE("displayed formula at n=100, w=100, k=1, C=1, alpha=0") {
        TraceBoundInfo info = trace_moment_bound(100, 100, 1, 1.0, 0.0);
        CHECK(info.threshold == doctest::Approx(64.0));
        CHECK(info.bound == doctest::Approx(100.0 * 100.0 * 4.0 / (1.0 - 0.64)));
        CHECK(info.k_low == doctest::Approx(std::log(100.0)));
        CHECK(info.k_high == doctest::Approx(std::pow(100.0, 1.0 / 6.0)));
    }
    SUBCASE("validity threshold rejects small W") {
        CHECK_THROWS_WITH_AS(trace_moment_bound(100, 50, 1, 1.0, 0.0),
                             doctest::Contains("64"), std::domain_error);
    }
    SUBCASE("monte carlo sits below the bound when the bound is valid") {
        // w = n = 101 is the smallest cyclic pattern with 101 entries per row
        SparsityPattern pat = SparsityPattern::cyclic_band(101, 101);
        TraceMomentEstimate est = trace_moment_mc(EntryLaw::rademacher(), pat, 1, 50, 12);
        TraceBoundInfo info = trace_moment_bound(101, 101, 1, 1.0, 0.0);
        CHECK(est.estimate == doctest::Approx(101.0 * 101.0).epsilon(1e-14));
        CHECK(est.estimate <= info.bound);
    }
}
