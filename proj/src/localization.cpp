#include "bandlab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bandlab {

namespace {

using cplx = std::complex<double>;

// Tail comparisons allow a relative fp slack so that exact rational ties
// (e.g. the uniform vector with eta = 1/2) resolve the way exact arithmetic
// would.
constexpr double kTieEps = 1e-12;

bool tail_le(double tail, double eta) { return tail <= eta + kTieEps * (1.0 + eta); }

void check_unit(std::span<const cplx> v) {
    double n2 = 0.0;
    for (const cplx& x : v) n2 += std::norm(x);
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-8)
        throw std::invalid_argument("localization: vector is not unit length");
}

// |v|^2 sorted descending with index tie order, plus the suffix sums
// suffix[L] = sum of all but the L largest squared magnitudes. Suffixes are
// accumulated from the smallest terms up.
std::vector<double> sorted_suffix(std::span<const cplx> v, std::vector<int>* order_out) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> w2(n);
    for (int i = 0; i < n; ++i) w2[i] = std::norm(v[i]);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w2[a] > w2[b]; });
    std::vector<double> suffix(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + w2[order[i]];
    if (order_out != nullptr) *order_out = std::move(order);
    return suffix;
}

}  // namespace

double tail_mass_top_L(std::span<const cplx> v, int L) {
    const int n = static_cast<int>(v.size());
    if (L < 1 || L > n) throw std::invalid_argument("tail_mass_top_L: need 1 <= L <= n");
    return sorted_suffix(v, nullptr)[L];
}

std::vector<int> top_support(std::span<const cplx> v, int L) {
    const int n = static_cast<int>(v.size());
    if (L < 1 || L > n) throw std::invalid_argument("top_support: need 1 <= L <= n");
    std::vector<int> order;
    sorted_suffix(v, &order);
    order.resize(L);
    std::sort(order.begin(), order.end());
    return order;
}

bool is_localized(std::span<const cplx> v, int L, double eta) {
    const int n = static_cast<int>(v.size());
    if (L < 1 || L > n) throw std::invalid_argument("is_localized: need 1 <= L <= n");
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("is_localized: need 0 <= eta < 1");
    check_unit(v);
    return tail_le(sorted_suffix(v, nullptr)[L], eta);
}

int loc_length(std::span<const cplx> v, double eta) {
    const int n = static_cast<int>(v.size());
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("loc_length: need 0 <= eta < 1");
    check_unit(v);
    std::vector<double> suffix = sorted_suffix(v, nullptr);
    for (int L = 1; L <= n; ++L)
        if (tail_le(suffix[L], eta)) return L;
    return n;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    const std::uint64_t cap = ~0ull >> 1;
    unsigned __int128 c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (c > cap) return cap;
    }
    return static_cast<std::uint64_t>(c);
}

namespace {

// lexicographic rank -> subset (combinatorial number system)
void unrank_subset(int n, int L, std::uint64_t rank, std::vector<int>& subset) {
    subset.resize(L);
    int x = 0;
    for (int i = 0; i < L; ++i) {
        for (int v = x; v < n; ++v) {
            std::uint64_t cnt = binomial(n - 1 - v, L - 1 - i);
            if (rank < cnt) {
                subset[i] = v;
                x = v + 1;
                break;
            }
            rank -= cnt;
        }
    }
}

bool next_subset(int n, std::vector<int>& s) {
    const int L = static_cast<int>(s.size());
    int i = L - 1;
    while (i >= 0 && s[i] == n - L + i) --i;
    if (i < 0) return false;
    ++s[i];
    for (int j = i + 1; j < L; ++j) s[j] = s[j - 1] + 1;
    return true;
}

double submatrix_rho(const HermitianMatrix& h, std::span<const int> subset) {
    if (subset.size() == 1) return std::abs(h(subset[0], subset[0]).real());
    HermitianMatrix sub = h.principal_submatrix(subset);
    Spectrum s = eigen_full(sub, false);
    return s.spectral_radius();
}

}  // namespace

double rho_L_exhaustive(const HermitianMatrix& h, int L, std::uint64_t budget) {
    const int n = h.n();
    if (L < 1 || L > n) throw std::invalid_argument("rho_L_exhaustive: need 1 <= L <= n");
    const std::uint64_t total = binomial(n, L);
    if (total > budget)
        throw std::invalid_argument(
            "rho_L_exhaustive: binomial(n,L) = " + std::to_string(total) +
            " exceeds the budget of " + std::to_string(budget) + "; use rho_L_search");
    const std::uint64_t chunk = 4096;
    const std::uint64_t nchunks = (total + chunk - 1) / chunk;
    std::vector<double> maxima(nchunks, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
        std::vector<int> subset;
        unrank_subset(n, L, static_cast<std::uint64_t>(c) * chunk, subset);
        double best = 0.0;
        const std::uint64_t hi = std::min(total, (static_cast<std::uint64_t>(c) + 1) * chunk);
        for (std::uint64_t r = static_cast<std::uint64_t>(c) * chunk; r < hi; ++r) {
            best = std::max(best, submatrix_rho(h, subset));
            next_subset(n, subset);
        }
        maxima[c] = best;
    }
    return *std::max_element(maxima.begin(), maxima.end());
}

double rho_L_search(const HermitianMatrix& h, int L, int restarts, int swap_budget,
                    CounterRng& rng) {
    const int n = h.n();
    if (L < 1 || L > n) throw std::invalid_argument("rho_L_search: need 1 <= L <= n");
    if (L == n) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        return submatrix_rho(h, all);
    }
    double best_global = 0.0;
    std::vector<int> pool(n);
    for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < L; ++i) {
            int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + L);
        std::sort(subset.begin(), subset.end());
        double cur = submatrix_rho(h, subset);
        long long budget = swap_budget;
        bool improved = true;
        while (improved && budget > 0) {
            improved = false;
            double best_val = cur;
            int best_pos = -1, best_new = -1;
            for (int pos = 0; pos < L && budget > 0; ++pos) {
                const int old = subset[pos];
                for (int cand = 0; cand < n && budget > 0; ++cand) {
                    if (std::find(subset.begin(), subset.end(), cand) != subset.end()) continue;
                    subset[pos] = cand;
                    --budget;
                    double val = submatrix_rho(h, subset);
                    if (val > best_val) {
                        best_val = val;
                        best_pos = pos;
                        best_new = cand;
                    }
                }
                subset[pos] = old;
            }
            if (best_pos >= 0) {
                subset[best_pos] = best_new;
                std::sort(subset.begin(), subset.end());
                cur = best_val;
                improved = true;
            }
        }
        best_global = std::max(best_global, cur);
    }
    return best_global;
}

std::vector<LemmaBoundRow> lemma_bound_check(const Spectrum& spec, int L, double rho_L_value,
                                             double rho_value) {
    if (!spec.has_vectors()) throw std::invalid_argument("lemma_bound_check: needs eigenvectors");
    const int n = spec.n;
    std::vector<LemmaBoundRow> rows(n);
    for (int i = 0; i < n; ++i) {
        std::span<const cplx> v(spec.vector(i), static_cast<std::size_t>(n));
        double eta = tail_mass_top_L(v, std::min(L, n));
        if (eta >= 1.0) throw std::logic_error("lemma_bound_check: tail mass >= 1 on unit vector");
        LemmaBoundRow& r = rows[i];
        r.index = i;
        r.lambda = spec.eigenvalues[i];
        r.eta = eta;
        r.lhs = std::abs(r.lambda) * std::sqrt(1.0 - eta);
        r.rhs = rho_L_value + std::sqrt(eta) * rho_value;
        r.margin = r.rhs - r.lhs;
        r.ok = r.lhs <= r.rhs + 1e-8 * rho_value;
    }
    return rows;
}

DelocalizationResult delocalization_experiment(const EntryLaw& law, PatternKind pattern, int n,
                                               int w, int L, double eta, double kappa, int trials,
                                               std::uint64_t master_seed) {
    if (!(eta >= 0.0 && eta < 1.0))
        throw std::invalid_argument("delocalization: need 0 <= eta < 1");
    double kappa_min = std::sqrt(eta / (1.0 - eta));
    if (!(kappa > kappa_min && kappa < 1.0))
        throw std::invalid_argument("delocalization: need sqrt(eta/(1-eta)) = " +
                                    std::to_string(kappa_min) + " < kappa < 1, got kappa = " +
                                    std::to_string(kappa));
    if (L < 1) throw std::invalid_argument("delocalization: need L >= 1");
    SparsityPattern pat = SparsityPattern::build(pattern, n, w);
    const double window = 2.0 * kappa * std::sqrt(static_cast<double>(w));

    DelocalizationResult res;
    res.trials = trials;
    res.rows.resize(static_cast<std::size_t>(trials) * n);
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t seed = derive_seed(master_seed, "delocalization", 0, trial);
        HermitianMatrix x = HermitianMatrix::sample(law, pat, seed);
        Spectrum spec = eigen_full(x, true);
        LocalizationRow* out = res.rows.data() + static_cast<std::size_t>(trial) * n;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            std::span<const cplx> v(spec.vector(i), static_cast<std::size_t>(n));
            std::vector<double> suffix = sorted_suffix(v, nullptr);
            LocalizationRow& r = out[i];
            r.n = n;
            r.w = w;
            r.trial = trial;
            r.seed = seed;
            r.eig_index = i;
            r.lambda = spec.eigenvalues[i];
            r.eta_at_L = suffix[std::min(L, n)];
            auto len_at = [&](double et) {
                for (int l = 1; l <= n; ++l)
                    if (tail_le(suffix[l], et)) return l;
                return n;
            };
            r.loc_len_eta10 = len_at(0.10);
            r.loc_len_eta25 = len_at(0.25);
            r.loc_len_eta50 = len_at(0.50);
            r.in_window = std::abs(r.lambda) >= window;
            r.localized = tail_le(r.eta_at_L, eta);
        }
        for (int i = 0; i < n; ++i) {
            const LocalizationRow& r = out[i];
            if (r.in_window) {
                ++res.windowed;
                if (r.localized) ++res.localized_in_window;
            }
        }
    }
    return res;
}

}  // namespace bandlab
