#include "bandlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bandlab {

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

// variance of a standard normal conditioned on |X| <= c
double truncated_variance(double c) {
    double z = 2.0 * normal_cdf(c) - 1.0;
    return 1.0 - 2.0 * c * normal_pdf(c) / z;
}

}  // namespace

EntryLaw EntryLaw::gaussian_real() {
    EntryLaw law;
    law.kind_ = LawKind::GaussianReal;
    law.moments_ = {1.0, 0.5};
    law.subgauss_ = {0.25, std::sqrt(2.0)};  // E exp(x^2/4) = sqrt(2)
    law.bound_ = std::numeric_limits<double>::infinity();
    law.name_ = "gaussian_real";
    return law;
}

EntryLaw EntryLaw::gaussian_complex() {
    EntryLaw law;
    law.kind_ = LawKind::GaussianComplex;
    law.moments_ = {1.0, 0.5};
    law.subgauss_ = {0.25, 4.0 / 3.0};  // |X|^2 ~ Exp(1): E exp(d|X|^2) = 1/(1-d)
    law.bound_ = std::numeric_limits<double>::infinity();
    law.name_ = "gaussian_complex";
    return law;
}

EntryLaw EntryLaw::rademacher() {
    EntryLaw law;
    law.kind_ = LawKind::Rademacher;
    law.moments_ = {1.0, 0.5};
    law.subgauss_ = {1.0, std::exp(1.0)};
    law.bound_ = 1.0;
    law.name_ = "rademacher";
    return law;
}

EntryLaw EntryLaw::uniform_centered() {
    EntryLaw law;
    law.kind_ = LawKind::UniformCentered;
    law.moments_ = {2.0, 0.5};  // |X| <= sqrt(3), so E|X|^k <= 3^(k/2) <= (2k)^(k/2)
    law.subgauss_ = {1.0, std::exp(3.0)};
    law.bound_ = std::sqrt(3.0);
    law.name_ = "uniform_centered";
    return law;
}

EntryLaw EntryLaw::truncated_gaussian(double cutoff) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("truncated_gaussian: cutoff must be > 0");
    EntryLaw law;
    law.kind_ = LawKind::TruncatedGaussian;
    law.cutoff_ = cutoff;
    double sigma = std::sqrt(truncated_variance(cutoff));
    law.bound_ = cutoff / sigma;
    double b2 = law.bound_ * law.bound_;
    law.moments_ = {std::max(1.0, b2), 0.5};
    law.subgauss_ = {0.5 / b2, std::exp(0.5)};
    law.name_ = "truncated_gaussian";
    return law;
}

EntryLaw EntryLaw::from_name(const std::string& name, double cutoff) {
    if (name == "gaussian_real" || name == "gaussian") return gaussian_real();
    if (name == "gaussian_complex") return gaussian_complex();
    if (name == "rademacher") return rademacher();
    if (name == "uniform" || name == "uniform_centered") return uniform_centered();
    if (name == "truncated_gaussian") return truncated_gaussian(cutoff);
    throw std::invalid_argument("unknown entry law: " + name);
}

double EntryLaw::sample_real(CounterRng& rng) const {
    switch (kind_) {
        case LawKind::GaussianReal:
        case LawKind::GaussianComplex:
            return rng.next_gauss();
        case LawKind::Rademacher:
            return (rng.next_u64() & 1) ? 1.0 : -1.0;
        case LawKind::UniformCentered:
            return (2.0 * rng.next_double() - 1.0) * std::sqrt(3.0);
        case LawKind::TruncatedGaussian: {
            double g;
            do {
                g = rng.next_gauss();
            } while (std::abs(g) > cutoff_);
            return g * bound_ / cutoff_;  // bound_/cutoff_ == 1/sigma
        }
    }
    return 0.0;
}

std::complex<double> EntryLaw::sample(CounterRng& rng) const {
    if (kind_ == LawKind::GaussianComplex) {
        const double s = std::sqrt(0.5);
        double re = rng.next_gauss() * s;
        double im = rng.next_gauss() * s;
        return {re, im};
    }
    return {sample_real(rng), 0.0};
}

SparsityPattern SparsityPattern::standard_band(int n, int w) {
    if (n < 1) throw std::invalid_argument("pattern: n must be >= 1");
    if (w < 1 || w > n) throw std::invalid_argument("pattern: need 1 <= w <= n");
    if (w % 2 == 0) throw std::invalid_argument("band width must be odd (w = 2b+1)");
    SparsityPattern p;
    p.n_ = n;
    p.w_ = w;
    p.b_ = (w - 1) / 2;
    p.kind_ = PatternKind::StandardBand;
    return p;
}

SparsityPattern SparsityPattern::cyclic_band(int n, int w) {
    SparsityPattern p = standard_band(n, w);
    p.kind_ = PatternKind::CyclicBand;
    return p;
}

SparsityPattern SparsityPattern::full(int n) {
    if (n < 1) throw std::invalid_argument("pattern: n must be >= 1");
    SparsityPattern p;
    p.n_ = n;
    p.w_ = n;
    p.b_ = n;
    p.kind_ = PatternKind::Full;
    return p;
}

SparsityPattern SparsityPattern::custom(int n, std::vector<std::uint8_t> mask, int w) {
    if (n < 1) throw std::invalid_argument("pattern: n must be >= 1");
    if (mask.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("custom mask: wrong size");
    if (w < 1 || w > n) throw std::invalid_argument("pattern: need 1 <= w <= n");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((mask[static_cast<std::size_t>(i) * n + j] != 0) !=
                (mask[static_cast<std::size_t>(j) * n + i] != 0))
                throw std::invalid_argument("custom mask: not symmetric");
    SparsityPattern p;
    p.n_ = n;
    p.w_ = w;
    p.b_ = 0;
    p.kind_ = PatternKind::CustomMask;
    p.mask_ = std::move(mask);
    return p;
}

SparsityPattern SparsityPattern::build(PatternKind kind, int n, int w) {
    switch (kind) {
        case PatternKind::StandardBand:
            return standard_band(n, w);
        case PatternKind::CyclicBand:
            return cyclic_band(n, w);
        case PatternKind::Full:
            if (w != n) throw std::invalid_argument("full pattern requires w == n");
            return full(n);
        case PatternKind::CustomMask:
            throw std::invalid_argument("custom masks cannot be built from (kind,n,w)");
    }
    throw std::invalid_argument("bad pattern kind");
}

int SparsityPattern::row_count(int i) const {
    switch (kind_) {
        case PatternKind::Full:
            return n_;
        case PatternKind::StandardBand:
            return std::min(n_ - 1, i + b_) - std::max(0, i - b_) + 1;
        case PatternKind::CyclicBand:
            return std::min(n_, 2 * b_ + 1);
        case PatternKind::CustomMask: {
            int c = 0;
            for (int j = 0; j < n_; ++j) c += mask_[static_cast<std::size_t>(i) * n_ + j] != 0;
            return c;
        }
    }
    return 0;
}

std::vector<int> SparsityPattern::row_counts() const {
    std::vector<int> c(n_);
    for (int i = 0; i < n_; ++i) c[i] = row_count(i);
    return c;
}

std::string SparsityPattern::kind_name() const {
    switch (kind_) {
        case PatternKind::Full:
            return "full";
        case PatternKind::StandardBand:
            return "standard_band";
        case PatternKind::CyclicBand:
            return "cyclic_band";
        case PatternKind::CustomMask:
            return "custom";
    }
    return "?";
}

HermitianMatrix::HermitianMatrix(SparsityPattern pattern, bool real)
    : n_(pattern.n()), pattern_(std::move(pattern)), real_(real),
      a_(static_cast<std::size_t>(n_) * n_) {}

HermitianMatrix HermitianMatrix::sample(const EntryLaw& law, const SparsityPattern& pattern,
                                        std::uint64_t seed) {
    HermitianMatrix h(pattern, !law.is_complex());
    const int n = h.n_;
    std::complex<double>* a = h.a_.data();
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (!pattern.allowed(i, j)) continue;
            CounterRng rng(seed, static_cast<std::uint64_t>(i) * n + j);
            std::complex<double> v =
                (i == j) ? std::complex<double>(law.sample_real(rng), 0.0) : law.sample(rng);
            a[static_cast<std::size_t>(i) * n + j] = v;
            a[static_cast<std::size_t>(j) * n + i] = std::conj(v);
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::from_dense(const SparsityPattern& pattern,
                                            std::vector<std::complex<double>> values) {
    const int n = pattern.n();
    if (values.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("from_dense: wrong value count");
    bool real = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::complex<double> v = values[static_cast<std::size_t>(i) * n + j];
            if (v != std::conj(values[static_cast<std::size_t>(j) * n + i]))
                throw std::invalid_argument("from_dense: not Hermitian");
            if (!pattern.allowed(i, j) && v != std::complex<double>(0.0, 0.0))
                throw std::invalid_argument("from_dense: nonzero entry outside pattern");
            if (v.imag() != 0.0) real = false;
        }
    }
    HermitianMatrix h(pattern, real);
    h.a_ = std::move(values);
    return h;
}

void HermitianMatrix::matvec(const std::complex<double>* x, std::complex<double>* y) const {
    const int n = n_;
    const std::complex<double>* a = a_.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const std::complex<double>* row = a + static_cast<std::size_t>(i) * n;
        std::complex<double> s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

double HermitianMatrix::frobenius_norm2() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return s;
}

double HermitianMatrix::trace_real() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += a_[static_cast<std::size_t>(i) * n_ + i].real();
    return s;
}

HermitianMatrix HermitianMatrix::principal_submatrix(std::span<const int> idx) const {
    const int m = static_cast<int>(idx.size());
    HermitianMatrix s(SparsityPattern::full(m), real_);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s.a_[static_cast<std::size_t>(i) * m + j] =
                a_[static_cast<std::size_t>(idx[i]) * n_ + idx[j]];
    return s;
}

std::vector<double> HermitianMatrix::real_copy() const {
    if (!real_) throw std::logic_error("real_copy: matrix has complex entries");
    std::vector<double> r(a_.size());
    const std::size_t total = a_.size();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i)
        r[i] = a_[i].real();
    return r;
}

void HermitianMatrix::write_csv(std::ostream& os) const {
    os << "row,col,re,im\n";
    char buf[128];
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (!pattern_.allowed(i, j)) continue;
            std::complex<double> v = (*this)(i, j);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", i, j, v.real(), v.imag());
            os << buf;
        }
    }
}

bool HypothesesReport::ok() const {
    if (!row_counts_ok || !mean_ok || !variance_ok) return false;
    for (bool b : moment_ok)
        if (!b) return false;
    return true;
}

HypothesesReport validate_hypotheses(const EntryLaw& law, const SparsityPattern& pattern,
                                     int law_samples, std::uint64_t seed) {
    HypothesesReport rep;
    rep.row_counts = pattern.row_counts();
    rep.declared_w = pattern.w();
    rep.max_row_count = *std::max_element(rep.row_counts.begin(), rep.row_counts.end());
    int full_rows = 0;
    for (int c : rep.row_counts) full_rows += (c == pattern.w());
    rep.fraction_full_rows = static_cast<double>(full_rows) / pattern.n();
    rep.row_counts_ok = rep.max_row_count <= pattern.w();

    // law draws: mean, |X|^2 and absolute moments up to 12
    CounterRng rng(seed, 0);
    double sum_re = 0, sum_im = 0, sum2_re = 0, sum2_im = 0;
    double sum_m2 = 0, sum_m2sq = 0;
    std::vector<double> mom(13, 0.0);
    for (int s = 0; s < law_samples; ++s) {
        std::complex<double> x = law.sample(rng);
        sum_re += x.real();
        sum_im += x.imag();
        sum2_re += x.real() * x.real();
        sum2_im += x.imag() * x.imag();
        double ax = std::abs(x);
        double m2 = ax * ax;
        sum_m2 += m2;
        sum_m2sq += m2 * m2;
        double p = ax;
        for (int k = 1; k <= 12; ++k) {
            mom[k] += p;
            p *= ax;
        }
    }
    const double inv = 1.0 / law_samples;
    rep.sample_mean_re = sum_re * inv;
    rep.sample_mean_im = sum_im * inv;
    rep.sample_second_moment = sum_m2 * inv;
    double se_re = std::sqrt(std::max(0.0, sum2_re * inv - rep.sample_mean_re * rep.sample_mean_re) * inv);
    double se_im = std::sqrt(std::max(0.0, sum2_im * inv - rep.sample_mean_im * rep.sample_mean_im) * inv);
    double var_m2 = std::max(0.0, sum_m2sq * inv - rep.sample_second_moment * rep.sample_second_moment);
    double se_m2 = std::sqrt(var_m2 * inv);
    rep.mean_ok = std::abs(rep.sample_mean_re) <= 5.0 * se_re &&
                  std::abs(rep.sample_mean_im) <= 5.0 * se_im;
    rep.variance_ok = std::abs(rep.sample_second_moment - 1.0) <= 5.0 * se_m2;

    rep.abs_moments.resize(12);
    rep.moment_ok.resize(12);
    for (int k = 1; k <= 12; ++k) {
        rep.abs_moments[k - 1] = mom[k] * inv;
        double bound = std::pow(law.moments().C * k, law.moments().alpha * k);
        rep.moment_ok[k - 1] = rep.abs_moments[k - 1] <= bound;
    }
    return rep;
}

}  // namespace bandlab
