#ifndef BANDLAB_ENSEMBLE_HPP
#define BANDLAB_ENSEMBLE_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bandlab/rng.hpp"

namespace bandlab {

enum class LawKind {
    GaussianReal,
    GaussianComplex,
    Rademacher,
    UniformCentered,
    TruncatedGaussian,
};

// E|X|^k <= (C k)^(alpha k) for k >= 2
struct MomentProfile {
    double C = 1.0;
    double alpha = 0.5;
};

// E exp(delta |X|^2) <= K
struct SubgaussProfile {
    double delta = 0.25;
    double K = 2.0;
};

// A centered, variance-one scalar entry distribution together with its
// declared moment and subgaussian certificates.
class EntryLaw {
  public:
    static EntryLaw gaussian_real();
    static EntryLaw gaussian_complex();
    static EntryLaw rademacher();
    static EntryLaw uniform_centered();
    static EntryLaw truncated_gaussian(double cutoff);
    static EntryLaw from_name(const std::string& name, double cutoff);

    LawKind kind() const { return kind_; }
    bool is_complex() const { return kind_ == LawKind::GaussianComplex; }
    const MomentProfile& moments() const { return moments_; }
    const SubgaussProfile& subgauss() const { return subgauss_; }
    double cutoff() const { return cutoff_; }
    // scale factor c/sigma(c) for the truncated law; |X| <= bound() almost surely
    // (infinite for the unbounded laws)
    double bound() const { return bound_; }
    const std::string& name() const { return name_; }

    // one off-diagonal draw; complex laws have independent Re/Im of variance 1/2
    std::complex<double> sample(CounterRng& rng) const;
    // one diagonal draw: always real with variance one
    double sample_real(CounterRng& rng) const;

  private:
    EntryLaw() = default;
    LawKind kind_ = LawKind::GaussianReal;
    double cutoff_ = 0.0;
    double bound_ = 0.0;
    MomentProfile moments_;
    SubgaussProfile subgauss_;
    std::string name_;
};

enum class PatternKind { StandardBand, CyclicBand, Full, CustomMask };

// Symmetric sparsity mask with a declared bandwidth W (max allowed entries
// per row; band kinds have W = 2b+1).
class SparsityPattern {
  public:
    static SparsityPattern standard_band(int n, int w);
    static SparsityPattern cyclic_band(int n, int w);
    static SparsityPattern full(int n);
    static SparsityPattern custom(int n, std::vector<std::uint8_t> mask, int w);
    static SparsityPattern build(PatternKind kind, int n, int w);

    int n() const { return n_; }
    int w() const { return w_; }
    int halfwidth() const { return b_; }
    PatternKind kind() const { return kind_; }

    bool allowed(int i, int j) const {
        switch (kind_) {
            case PatternKind::Full:
                return true;
            case PatternKind::StandardBand:
                return (i > j ? i - j : j - i) <= b_;
            case PatternKind::CyclicBand: {
                int d = i > j ? i - j : j - i;
                return (d <= b_) || (n_ - d <= b_);
            }
            case PatternKind::CustomMask:
                return mask_[static_cast<std::size_t>(i) * n_ + j] != 0;
        }
        return false;
    }

    int row_count(int i) const;
    std::vector<int> row_counts() const;
    std::string kind_name() const;

  private:
    SparsityPattern() = default;
    int n_ = 0;
    int w_ = 0;
    int b_ = 0;
    PatternKind kind_ = PatternKind::Full;
    std::vector<std::uint8_t> mask_;
};

// Dense Hermitian matrix with an attached sparsity pattern. Entries outside
// the pattern are exactly zero; X[j][i] == conj(X[i][j]) bit for bit.
class HermitianMatrix {
  public:
    HermitianMatrix(SparsityPattern pattern, bool real);

    // Sample with independent entries on the allowed upper triangle, lower
    // triangle mirrored. Entry (i,j) is drawn from its own counter stream, so
    // the result is identical for every row order / thread count.
    static HermitianMatrix sample(const EntryLaw& law, const SparsityPattern& pattern,
                                  std::uint64_t seed);

    // Build from explicit entries (tests); validates Hermitian symmetry and
    // the pattern. Values must already satisfy a[j*n+i] == conj(a[i*n+j]).
    static HermitianMatrix from_dense(const SparsityPattern& pattern,
                                      std::vector<std::complex<double>> values);

    int n() const { return n_; }
    const SparsityPattern& pattern() const { return pattern_; }
    bool is_real() const { return real_; }
    std::complex<double> operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }
    const std::complex<double>* data() const { return a_.data(); }
    const std::complex<double>* row(int i) const {
        return a_.data() + static_cast<std::size_t>(i) * n_;
    }

    void matvec(const std::complex<double>* x, std::complex<double>* y) const;
    double frobenius_norm2() const;
    double trace_real() const;
    HermitianMatrix principal_submatrix(std::span<const int> idx) const;
    std::vector<double> real_copy() const;  // requires is_real()

    // debugging export, one line per stored entry: row,col,re,im
    void write_csv(std::ostream& os) const;

  private:
    int n_;
    SparsityPattern pattern_;
    bool real_;
    std::vector<std::complex<double>> a_;
};

struct HypothesesReport {
    std::vector<int> row_counts;
    int declared_w = 0;
    int max_row_count = 0;
    double fraction_full_rows = 0.0;
    bool row_counts_ok = false;  // no row exceeds W

    double sample_mean_re = 0.0;
    double sample_mean_im = 0.0;
    double sample_second_moment = 0.0;
    bool mean_ok = false;        // within 5 sigma of 0
    bool variance_ok = false;    // E|X|^2 within 5 sigma of 1
    std::vector<double> abs_moments;   // E|X|^k, k = 1..12
    std::vector<bool> moment_ok;       // vs (C k)^(alpha k)

    bool ok() const;
};

// Diagnostic check of the ensemble hypotheses: row-count structure of the
// pattern and Monte Carlo moment checks of the law.
HypothesesReport validate_hypotheses(const EntryLaw& law, const SparsityPattern& pattern,
                                     int law_samples, std::uint64_t seed);

}  // namespace bandlab

#endif
