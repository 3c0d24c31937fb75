#ifndef BANDLAB_EIGEN_HPP
#define BANDLAB_EIGEN_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "bandlab/ensemble.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

// QL iteration failed to deflate an eigenvalue within the sweep limit.
struct EigenIterationError : std::runtime_error {
    explicit EigenIterationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Lanczos ran out of iterations; carries the best estimate seen.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, double best, double res)
        : std::runtime_error(msg), best_value(best), residual(res) {}
    double best_value;
    double residual;
};

struct Spectrum {
    int n = 0;
    std::vector<double> eigenvalues;                 // ascending
    std::vector<std::complex<double>> eigenvectors;  // n*n, eigenvector j contiguous at j*n
    double residual_bound = 0.0;                     // max_j ||H v_j - lambda_j v_j||_2

    bool has_vectors() const { return !eigenvectors.empty(); }
    const std::complex<double>* vector(int j) const {
        return eigenvectors.data() + static_cast<std::size_t>(j) * n;
    }
    double lambda_min() const { return eigenvalues.front(); }
    double lambda_max() const { return eigenvalues.back(); }
    double spectral_radius() const {
        return std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
    }
};

struct EigenOptions {
    bool want_vectors = false;
    double tol = 0.0;            // residual certificate target; 0 -> 1e-10 * ||H||_F
    int max_sweeps = 50;         // QL sweeps per eigenvalue
    bool check_residual = true;  // compute residual_bound when vectors are present
};

// Full spectrum by Householder tridiagonalization + implicit-shift QL with
// deflation. Real-symmetric input takes a real fast path; complex Hermitian
// is reduced by complex Householder directly. Deterministic for fixed input,
// independent of thread count.
Spectrum eigen_full(const HermitianMatrix& H, const EigenOptions& opt);
Spectrum eigen_full(const HermitianMatrix& H, bool want_vectors, double tol = 0.0);

struct TridiagFactor {
    int n = 0;
    std::vector<double> diag;             // length n
    std::vector<double> sub;              // length n-1, real and >= 0
    std::vector<std::complex<double>> q;  // n*n row-major unitary with Q^H H Q = T
};

// Householder reduction to real symmetric tridiagonal form (Q included).
TridiagFactor tridiagonalize(const HermitianMatrix& H);

enum class WhichExtreme { Max, Min, SpectralRadius };

struct ExtremeResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Extreme eigenvalue by Lanczos with full reorthogonalization; random start
// vector from the provided stream, one restart on breakdown. The returned
// value is within `residual` of a true eigenvalue (Hermitian perturbation
// bound); throws ConvergenceError if residual > tol after max_iter steps.
ExtremeResult lambda_extreme(const HermitianMatrix& H, WhichExtreme which, double tol,
                             int max_iter, CounterRng& rng);

// max(|lambda_min|, |lambda_max|) = operator norm; full QL for small n,
// Lanczos above that. Deterministic (fixed internal stream).
double spectral_radius(const HermitianMatrix& H);

}  // namespace bandlab

#endif
