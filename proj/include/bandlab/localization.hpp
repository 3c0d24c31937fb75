#ifndef BANDLAB_LOCALIZATION_HPP
#define BANDLAB_LOCALIZATION_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bandlab/eigen.hpp"
#include "bandlab/ensemble.hpp"

namespace bandlab {

// A unit vector is (L, eta)-localized when some L coordinates carry all but
// eta of the squared mass. The magnitude-sorted prefix is an optimal support
// (exchange argument), with ties broken by lower index.

// squared mass outside the top-L support
double tail_mass_top_L(std::span<const std::complex<double>> v, int L);
// indices of the L largest-|v| coordinates, in the deterministic tie order
std::vector<int> top_support(std::span<const std::complex<double>> v, int L);

bool is_localized(std::span<const std::complex<double>> v, int L, double eta);

// minimal L with tail <= eta (n at most; 1 at least)
int loc_length(std::span<const std::complex<double>> v, double eta);

// Exact max spectral radius over all L x L principal submatrices, subsets in
// lexicographic order. Throws when binomial(n, L) exceeds the budget.
double rho_L_exhaustive(const HermitianMatrix& h, int L, std::uint64_t budget = 2000000);

// Local-search lower bound: random initial subsets improved by best single
// index swaps. Always <= the true rho_L.
double rho_L_search(const HermitianMatrix& h, int L, int restarts, int swap_budget,
                    CounterRng& rng);

std::uint64_t binomial(int n, int k);  // saturates at 2^63-1

struct LemmaBoundRow {
    int index = 0;
    double lambda = 0.0;
    double eta = 0.0;      // tail mass of the top-L support of v_i
    double lhs = 0.0;      // |lambda_i| sqrt(1 - eta_i)
    double rhs = 0.0;      // rho_L + sqrt(eta_i) rho
    double margin = 0.0;   // rhs - lhs
    bool ok = false;
};

// Deterministic eigenvalue bound check: every eigenvector is (L, eta_i)-
// localized with eta_i equal to its own top-L tail mass, so
// |lambda_i| sqrt(1-eta_i) <= rho_L + sqrt(eta_i) rho must hold for all i
// (fp tolerance 1e-8 rho).
std::vector<LemmaBoundRow> lemma_bound_check(const Spectrum& spec, int L, double rho_L_value,
                                             double rho_value);

struct LocalizationRow {
    int n = 0, w = 0, trial = 0;
    std::uint64_t seed = 0;
    int eig_index = 0;
    double lambda = 0.0;
    double eta_at_L = 0.0;
    int loc_len_eta10 = 0;
    int loc_len_eta25 = 0;
    int loc_len_eta50 = 0;
    bool in_window = false;   // |lambda| >= 2 kappa sqrt(W)
    bool localized = false;   // (L, eta)-localized
};

struct DelocalizationResult {
    std::vector<LocalizationRow> rows;   // one per eigenvector per trial
    long long windowed = 0;              // eigenvectors with |lambda| >= 2 kappa sqrt(W)
    long long localized_in_window = 0;   // violations of the delocalization statement
    int trials = 0;
};

// Counts (L, eta)-localized eigenvectors in the spectral window
// |lambda| >= 2 kappa sqrt(W). Requires sqrt(eta/(1-eta)) < kappa < 1.
DelocalizationResult delocalization_experiment(const EntryLaw& law, PatternKind pattern, int n,
                                               int w, int L, double eta, double kappa, int trials,
                                               std::uint64_t master_seed);

}  // namespace bandlab

#endif
