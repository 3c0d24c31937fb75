#include "bandlab/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bandlab/stats.hpp"

namespace bandlab {

std::vector<int> canonical_walk(std::span<const int> tuple) {
    if (tuple.size() < 2 || tuple.size() % 2 != 0)
        throw std::invalid_argument("canonical_walk: length must be even and >= 2");
    std::vector<int> out(tuple.size());
    std::map<int, int> relabel;
    int next = 1;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        auto [it, inserted] = relabel.try_emplace(tuple[i], next);
        if (inserted) ++next;
        out[i] = it->second;
    }
    return out;
}

namespace {

// classify a canonical closed word: edge multiplicities (undirected, loops
// included), vertex count, and the (l, m) split; returns false when some
// edge is visited only once
bool classify(const std::vector<int>& word, WalkClass& out) {
    const int len = static_cast<int>(word.size());
    std::map<std::pair<int, int>, int> mult;
    for (int i = 0; i < len; ++i) {
        int a = word[i];
        int b = word[(i + 1) % len];
        if (a > b) std::swap(a, b);
        ++mult[{a, b}];
    }
    int l = 0, m = 0;
    for (const auto& [edge, count] : mult) {
        if (count < 2) return false;
        if (count == 2)
            ++l;
        else
            ++m;
    }
    out.word = word;
    out.t = *std::max_element(word.begin(), word.end());
    out.l = l;
    out.m = m;
    out.edge_multiplicities = std::move(mult);
    return true;
}

void enumerate_words(std::vector<int>& word, int pos, int max_label,
                     std::vector<WalkClass>& out) {
    const int len = static_cast<int>(word.size());
    if (pos == len) {
        WalkClass cls;
        if (classify(word, cls)) out.push_back(std::move(cls));
        return;
    }
    // canonical growth: next symbol is an existing label or max_label + 1
    for (int v = 1; v <= max_label + 1; ++v) {
        word[pos] = v;
        enumerate_words(word, pos + 1, std::max(max_label, v), out);
    }
}

}  // namespace

std::vector<WalkClass> enumerate_classes(int k, int limit) {
    if (k < 1) throw std::invalid_argument("enumerate_classes: k must be >= 1");
    if (k > limit)
        throw std::invalid_argument("enumerate_classes: k = " + std::to_string(k) +
                                    " exceeds the limit of " + std::to_string(limit) +
                                    " (canonical word count grows superexponentially)");
    std::vector<WalkClass> out;
    std::vector<int> word(2 * k);
    word[0] = 1;
    enumerate_words(word, 1, 1, out);
    std::sort(out.begin(), out.end(),
              [](const WalkClass& a, const WalkClass& b) { return a.word < b.word; });
    return out;
}

WalkInequalityReport verify_fk_inequalities(int k) {
    WalkInequalityReport rep;
    rep.k = k;
    rep.ok = true;
    for (const WalkClass& c : enumerate_classes(k)) {
        ++rep.classes_checked;
        std::string failed;
        if (2 * c.l + 3 * c.m > 2 * k)
            failed = "2l+3m <= 2k";
        else if (c.t > c.l + c.m + 1)
            failed = "t <= l+m+1";
        else if (2 * k - 2 * c.l > 6 * (k - c.t + 1))
            failed = "2k-2l <= 6(k-t+1)";
        else if (c.t > k + 1)
            failed = "t <= k+1";
        if (!failed.empty()) {
            rep.ok = false;
            rep.failed_inequality = failed;
            rep.counterexample = c;
            return rep;
        }
    }
    return rep;
}

std::vector<CountBoundRow> count_bound_check(int k) {
    std::map<int, long long> counts;
    for (const WalkClass& c : enumerate_classes(k)) ++counts[c.t];
    std::vector<CountBoundRow> rows;
    for (const auto& [t, count] : counts) {
        CountBoundRow row;
        row.k = k;
        row.t = t;
        row.count = count;
        row.bound = std::pow(4.0, k) * std::pow(2.0 * k, 6.0 * (k - t + 1));
        row.ok = static_cast<double>(count) <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

TraceMomentEstimate trace_moment_mc(const EntryLaw& law, const SparsityPattern& pattern, int k,
                                    int trials, std::uint64_t master_seed) {
    if (k < 1) throw std::invalid_argument("trace_moment_mc: k must be >= 1");
    if (trials < 1) throw std::invalid_argument("trace_moment_mc: trials must be >= 1");
    const int n = pattern.n();
    std::vector<double> values(trials);
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t seed = derive_seed(master_seed, "trace_moment", 0, trial);
        HermitianMatrix x = HermitianMatrix::sample(law, pattern, seed);
        // Tr X^(2k) = ||X^k||_F^2 via k-1 dense multiplications
        std::vector<std::complex<double>> cur(x.data(), x.data() + static_cast<std::size_t>(n) * n);
        std::vector<std::complex<double>> next(cur.size());
        for (int step = 1; step < k; ++step) {
            for (int i = 0; i < n; ++i) {
                const std::complex<double>* row = x.row(i);
                for (int j = 0; j < n; ++j) {
                    std::complex<double> s = 0.0;
                    for (int t = 0; t < n; ++t) s += row[t] * cur[static_cast<std::size_t>(t) * n + j];
                    next[static_cast<std::size_t>(i) * n + j] = s;
                }
            }
            std::swap(cur, next);
        }
        long double fro2 = 0.0;
        for (const auto& v : cur) fro2 += static_cast<long double>(std::norm(v));
        values[trial] = static_cast<double>(fro2);
    }
    MeanStderr ms = mean_stderr(values);
    return {ms.mean, ms.stderr_, trials};
}

TraceBoundInfo trace_moment_bound(int n, int w, int k, double C, double alpha) {
    if (n < 1 || w < 1 || k < 1) throw std::invalid_argument("trace_moment_bound: bad sizes");
    if (C < 0.0 || alpha < 0.0) throw std::invalid_argument("trace_moment_bound: bad profile");
    TraceBoundInfo info;
    double base = 2.0 * k * std::pow(6.0 * C * k, alpha);
    info.threshold = std::pow(base, 6.0);
    info.k_low = std::log(static_cast<double>(n));
    info.k_high = std::pow(static_cast<double>(w), 1.0 / (6.0 * (1.0 + alpha)));
    if (!(static_cast<double>(w) > info.threshold))
        throw std::domain_error("trace_moment_bound: requires W > (2k(6Ck)^alpha)^6 = " +
                                std::to_string(info.threshold) + ", got W = " + std::to_string(w));
    info.bound = static_cast<double>(n) * std::pow(static_cast<double>(w), k) * std::pow(4.0, k) /
                 (1.0 - info.threshold / w);
    return info;
}

}  // namespace bandlab
