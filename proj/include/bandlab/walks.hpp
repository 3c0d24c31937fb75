#ifndef BANDLAB_WALKS_HPP
#define BANDLAB_WALKS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bandlab/ensemble.hpp"

namespace bandlab {

// One equivalence class of closed index walks of length 2k (relabeling
// symmetry), every edge of the walk graph visited at least twice. Loops
// count as edges and their visits count like any other edge; edge visits
// are undirected.
struct WalkClass {
    std::vector<int> word;  // canonical: first-appearance labels 1,2,3,...
    int t = 0;              // distinct vertices
    int l = 0;              // edges visited exactly twice
    int m = 0;              // edges visited three or more times
    std::map<std::pair<int, int>, int> edge_multiplicities;
};

// relabel by order of first appearance; two tuples share a canonical word
// iff they are in the same relabeling orbit
std::vector<int> canonical_walk(std::span<const int> tuple);

// All classes with word length 2k (closed, every edge visited >= 2), grouped
// canonically; throws beyond the configured k limit.
std::vector<WalkClass> enumerate_classes(int k, int limit = 5);

struct WalkInequalityReport {
    int k = 0;
    long long classes_checked = 0;
    bool ok = false;
    std::string failed_inequality;           // empty when ok
    std::optional<WalkClass> counterexample;
};

// Checks 2l+3m <= 2k, t <= l+m+1, 2k-2l <= 6(k-t+1) and t <= k+1 on every
// class.
WalkInequalityReport verify_fk_inequalities(int k);

struct CountBoundRow {
    int k = 0;
    int t = 0;
    long long count = 0;
    double bound = 0.0;  // 4^k (2k)^(6(k-t+1))
    bool ok = false;
};

std::vector<CountBoundRow> count_bound_check(int k);

struct TraceMomentEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    int trials = 0;
};

// Monte Carlo estimate of E Tr X^(2k) over sampled matrices.
TraceMomentEstimate trace_moment_mc(const EntryLaw& law, const SparsityPattern& pattern, int k,
                                    int trials, std::uint64_t master_seed);

struct TraceBoundInfo {
    double bound = 0.0;       // N W^k 4^k / (1 - threshold/W)
    double threshold = 0.0;   // (2k (6Ck)^alpha)^6; valid only when W > threshold
    double k_low = 0.0;       // log N, lower end of the admissible-k window
    double k_high = 0.0;      // W^(1/(6(1+alpha))), upper end
};

// Throws std::domain_error when W <= threshold (the bound is vacuous there).
TraceBoundInfo trace_moment_bound(int n, int w, int k, double C, double alpha);

}  // namespace bandlab

#endif
