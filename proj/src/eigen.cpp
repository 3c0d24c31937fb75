#include "bandlab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>

namespace bandlab {

namespace {

using cplx = std::complex<double>;

std::string fmt_g(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Householder reduction, real symmetric path. `a` is n x n row-major and is
// destroyed; Householder vectors remain in the strict lower part (column k,
// rows k+2..n-1 hold u[1..], u[0] is kept in `u0s`). d/e receive the
// tridiagonal. All loops are either elementwise-parallel or serial scans, so
// the result is identical for every thread count.
// ---------------------------------------------------------------------------
struct RealReduction {
    std::vector<double> betas;  // scaling of each reflector
    std::vector<double> u0s;    // first component of each reflector
};

RealReduction tridiag_real(std::vector<double>& a, int n, std::vector<double>& d,
                           std::vector<double>& e) {
    RealReduction red;
    red.betas.assign(std::max(n - 2, 0), 0.0);
    red.u0s.assign(std::max(n - 2, 0), 0.0);
    d.assign(n, 0.0);
    e.assign(std::max(n - 1, 0), 0.0);
    std::vector<double> u(n), p(n), w(n);

    for (int k = 0; k < n - 2; ++k) {
        const int lo = k + 1;
        const int m = n - lo;
        double* col = a.data() + static_cast<std::size_t>(lo) * n + k;
        double sig2 = 0.0;
        for (int i = 0; i < m; ++i) sig2 += col[static_cast<std::size_t>(i) * n] * col[static_cast<std::size_t>(i) * n];
        double sigma = std::sqrt(sig2);
        if (sigma == 0.0) {
            e[k] = 0.0;
            continue;
        }
        double x0 = a[static_cast<std::size_t>(lo) * n + k];
        double alpha = x0 >= 0.0 ? -sigma : sigma;
        double beta = 1.0 / (sigma * (sigma + std::abs(x0)));
        e[k] = alpha;
        red.betas[k] = beta;
        red.u0s[k] = x0 - alpha;

        u[lo] = x0 - alpha;
        for (int i = lo + 1; i < n; ++i) u[i] = a[static_cast<std::size_t>(i) * n + k];

        // p = beta * A[lo:,lo:] u
#pragma omp parallel for schedule(static)
        for (int i = lo; i < n; ++i) {
            const double* row = a.data() + static_cast<std::size_t>(i) * n;
            double s = 0.0;
            for (int j = lo; j < n; ++j) s += row[j] * u[j];
            p[i] = beta * s;
        }
        double updot = 0.0;
        for (int i = lo; i < n; ++i) updot += u[i] * p[i];
        const double kk = 0.5 * beta * updot;
        for (int i = lo; i < n; ++i) w[i] = p[i] - kk * u[i];

        // A <- A - u w^T - w u^T on the trailing block
#pragma omp parallel for schedule(static)
        for (int i = lo; i < n; ++i) {
            double* row = a.data() + static_cast<std::size_t>(i) * n;
            const double ui = u[i], wi = w[i];
            for (int j = lo; j < n; ++j) row[j] -= ui * w[j] + wi * u[j];
        }
        // store reflector tail back into column k for the Q accumulation
        for (int i = lo; i < n; ++i) a[static_cast<std::size_t>(i) * n + k] = u[i];
    }
    for (int k = 0; k < n; ++k) d[k] = a[static_cast<std::size_t>(k) * n + k];
    if (n >= 2) e[n - 2] = a[static_cast<std::size_t>(n - 1) * n + (n - 2)];
    return red;
}

// Back-accumulate Q = H_0 H_1 ... H_{n-3} into row-major z (must start as I).
void accumulate_q_real(const std::vector<double>& a, int n, const RealReduction& red,
                       std::vector<double>& z) {
    std::vector<double> v(n);
    for (int k = n - 3; k >= 0; --k) {
        if (red.betas[k] == 0.0) continue;
        const int lo = k + 1;
        const double beta = red.betas[k];
        // v = u^T Z over the active block; one thread owns a j-range and
        // walks all rows, so every v[j] is a serial sum.
#pragma omp parallel for schedule(static)
        for (int j = lo; j < n; ++j) {
            double s = 0.0;
            for (int i = lo; i < n; ++i)
                s += a[static_cast<std::size_t>(i) * n + k] * z[static_cast<std::size_t>(i) * n + j];
            v[j] = s;
        }
#pragma omp parallel for schedule(static)
        for (int i = lo; i < n; ++i) {
            const double bui = beta * a[static_cast<std::size_t>(i) * n + k];
            double* zrow = z.data() + static_cast<std::size_t>(i) * n;
            for (int j = lo; j < n; ++j) zrow[j] -= bui * v[j];
        }
    }
}

// ---------------------------------------------------------------------------
// Complex Hermitian path. Identical structure; the reflector scaling beta
// stays real, the subdiagonal comes out complex and is rotated real >= 0 by
// a diagonal phase matrix folded into Q.
// ---------------------------------------------------------------------------
struct ComplexReduction {
    std::vector<double> betas;
    std::vector<cplx> u0s;
    std::vector<cplx> subdiag;  // complex subdiagonal before phase normalization
};

ComplexReduction tridiag_complex(std::vector<cplx>& a, int n, std::vector<double>& d,
                                 std::vector<double>& e, std::vector<cplx>& phases) {
    ComplexReduction red;
    red.betas.assign(std::max(n - 2, 0), 0.0);
    red.u0s.assign(std::max(n - 2, 0), cplx(0.0));
    red.subdiag.assign(std::max(n - 1, 0), cplx(0.0));
    d.assign(n, 0.0);
    e.assign(std::max(n - 1, 0), 0.0);
    std::vector<cplx> u(n), p(n), w(n);

    for (int k = 0; k < n - 2; ++k) {
        const int lo = k + 1;
        double sig2 = 0.0;
        for (int i = lo; i < n; ++i) sig2 += std::norm(a[static_cast<std::size_t>(i) * n + k]);
        double sigma = std::sqrt(sig2);
        if (sigma == 0.0) {
            red.subdiag[k] = 0.0;
            continue;
        }
        cplx x0 = a[static_cast<std::size_t>(lo) * n + k];
        double ax0 = std::abs(x0);
        cplx phase = ax0 == 0.0 ? cplx(1.0) : x0 / ax0;
        cplx alpha = -phase * sigma;
        double beta = 1.0 / (sigma * (sigma + ax0));
        red.subdiag[k] = alpha;
        red.betas[k] = beta;
        red.u0s[k] = x0 - alpha;

        u[lo] = x0 - alpha;
        for (int i = lo + 1; i < n; ++i) u[i] = a[static_cast<std::size_t>(i) * n + k];

#pragma omp parallel for schedule(static)
        for (int i = lo; i < n; ++i) {
            const cplx* row = a.data() + static_cast<std::size_t>(i) * n;
            cplx s = 0.0;
            for (int j = lo; j < n; ++j) s += row[j] * u[j];
            p[i] = beta * s;
        }
        cplx updot = 0.0;
        for (int i = lo; i < n; ++i) updot += std::conj(u[i]) * p[i];
        const double kk = 0.5 * beta * updot.real();  // u^H A u is real for Hermitian A
        for (int i = lo; i < n; ++i) w[i] = p[i] - kk * u[i];

#pragma omp parallel for schedule(static)
        for (int i = lo; i < n; ++i) {
            cplx* row = a.data() + static_cast<std::size_t>(i) * n;
            const cplx ui = u[i], wi = w[i];
            for (int j = lo; j < n; ++j) row[j] -= ui * std::conj(w[j]) + wi * std::conj(u[j]);
        }
        for (int i = lo; i < n; ++i) a[static_cast<std::size_t>(i) * n + k] = u[i];
    }
    for (int k = 0; k < n; ++k) d[k] = a[static_cast<std::size_t>(k) * n + k].real();
    if (n >= 2) red.subdiag[n - 2] = a[static_cast<std::size_t>(n - 1) * n + (n - 2)];

    // diagonal phases making the subdiagonal real nonnegative:
    // (D^H T D)[k][k+1] = conj(d_k) conj(e_k) d_{k+1} = |e_k|
    phases.assign(n, cplx(1.0));
    for (int k = 0; k + 1 < n; ++k) {
        cplx ek = red.subdiag[k];
        double m = std::abs(ek);
        e[k] = m;
        phases[k + 1] = m == 0.0 ? phases[k] : phases[k] * (ek / m);
    }
    return red;
}

void accumulate_q_complex(const std::vector<cplx>& a, int n, const ComplexReduction& red,
                          const std::vector<cplx>& phases, std::vector<cplx>& z) {
    std::vector<cplx> v(n);
    for (int k = n - 3; k >= 0; --k) {
        if (red.betas[k] == 0.0) continue;
        const int lo = k + 1;
        const double beta = red.betas[k];
#pragma omp parallel for schedule(static)
        for (int j = lo; j < n; ++j) {
            cplx s = 0.0;
            for (int i = lo; i < n; ++i)
                s += std::conj(a[static_cast<std::size_t>(i) * n + k]) *
                     z[static_cast<std::size_t>(i) * n + j];
            v[j] = s;
        }
#pragma omp parallel for schedule(static)
        for (int i = lo; i < n; ++i) {
            const cplx bui = beta * a[static_cast<std::size_t>(i) * n + k];
            cplx* zrow = z.data() + static_cast<std::size_t>(i) * n;
            for (int j = lo; j < n; ++j) zrow[j] -= bui * v[j];
        }
    }
    // fold in the subdiagonal phase normalization: Q <- Q diag(phases)
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        cplx* zrow = z.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) zrow[j] *= phases[j];
    }
}

// ---------------------------------------------------------------------------
// Implicit-shift QL with deflation on (d, e). Rotations of each sweep are
// recorded and then applied row-parallel to Z (z_rows x n row-major, real or
// complex), which keeps the float semantics independent of threading. Z rows
// evolve independently under the column rotations, so callers that only need
// one row (Lanczos residuals track the bottom row of the small eigenvector
// matrix) pass z_rows = 1.
// ---------------------------------------------------------------------------
template <typename Scalar>
void apply_rotations(Scalar* z, int z_rows, int n, const std::vector<int>& ri,
                     const std::vector<double>& rc, const std::vector<double>& rs, int count) {
    if (z == nullptr || count == 0) return;
#pragma omp parallel for schedule(static) if (z_rows > 64)
    for (int row = 0; row < z_rows; ++row) {
        Scalar* zr = z + static_cast<std::size_t>(row) * n;
        for (int t = 0; t < count; ++t) {
            const int i = ri[t];
            const Scalar f = zr[i + 1];
            zr[i + 1] = rs[t] * zr[i] + rc[t] * f;
            zr[i] = rc[t] * zr[i] - rs[t] * f;
        }
    }
}

template <typename Scalar>
void ql_implicit(std::vector<double>& d, std::vector<double>& e, int n, int max_sweeps,
                 Scalar* z, int z_rows) {
    if (n <= 1) return;
    e.resize(n, 0.0);  // e[n-1] is sweep scratch
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<int> ri(n);
    std::vector<double> rc(n), rs(n);

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            while (m < n - 1) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
                ++m;
            }
            if (m == l) break;
            if (++iter > max_sweeps)
                throw EigenIterationError("QL iteration exceeded " + std::to_string(max_sweeps) +
                                          " sweeps at eigenvalue " + std::to_string(l));
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int count = 0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                ri[count] = i;
                rc[count] = c;
                rs[count] = s;
                ++count;
            }
            apply_rotations(z, z_rows, n, ri, rc, rs, count);
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

// sort ascending, permuting the row-major Z columns alongside
template <typename Scalar>
void sort_spectrum(std::vector<double>& d, int n, Scalar* z, int z_rows) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    std::vector<double> ds(n);
    for (int j = 0; j < n; ++j) ds[j] = d[order[j]];
    d = std::move(ds);
    if (z != nullptr) {
        std::vector<Scalar> tmp(n);
#pragma omp parallel for schedule(static) firstprivate(tmp) if (z_rows > 64)
        for (int i = 0; i < z_rows; ++i) {
            Scalar* zr = z + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) tmp[j] = zr[order[j]];
            std::copy(tmp.begin(), tmp.end(), zr);
        }
    }
}

// phase convention: first coordinate with |z| > 1e-12 made real positive
void fix_phases(std::vector<cplx>& vectors, int n) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        cplx* v = vectors.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            double m = std::abs(v[i]);
            if (m > 1e-12) {
                cplx ph = std::conj(v[i]) / m;
                for (int t = 0; t < n; ++t) v[t] *= ph;
                break;
            }
        }
    }
}

double default_tol(const HermitianMatrix& h, double tol) {
    if (tol > 0.0) return tol;
    double f = std::sqrt(h.frobenius_norm2());
    return 1e-10 * (f > 0.0 ? f : 1.0);
}

double compute_residual_bound(const HermitianMatrix& h, const Spectrum& spec) {
    const int n = h.n();
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int j = 0; j < n; ++j) {
        const cplx* v = spec.vector(j);
        const double lambda = spec.eigenvalues[j];
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx* row = h.row(i);
            cplx s = 0.0;
            for (int t = 0; t < n; ++t) s += row[t] * v[t];
            s -= lambda * v[i];
            r2 += std::norm(s);
        }
        worst = std::max(worst, std::sqrt(r2));
    }
    return worst;
}

}  // namespace

Spectrum eigen_full(const HermitianMatrix& h, const EigenOptions& opt) {
    const int n = h.n();
    if (n < 1) throw std::invalid_argument("eigen_full: empty matrix");
    Spectrum spec;
    spec.n = n;

    std::vector<double> d, e;
    if (h.is_real()) {
        std::vector<double> a = h.real_copy();
        RealReduction red = tridiag_real(a, n, d, e);
        std::vector<double> z;
        if (opt.want_vectors) {
            z.assign(static_cast<std::size_t>(n) * n, 0.0);
            for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;
            accumulate_q_real(a, n, red, z);
        }
        double* zp = opt.want_vectors ? z.data() : nullptr;
        ql_implicit(d, e, n, opt.max_sweeps, zp, n);
        sort_spectrum(d, n, zp, n);
        spec.eigenvalues = std::move(d);
        if (opt.want_vectors) {
            spec.eigenvectors.resize(static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(static)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    spec.eigenvectors[static_cast<std::size_t>(j) * n + i] =
                        z[static_cast<std::size_t>(i) * n + j];
        }
    } else {
        std::vector<cplx> a(h.data(), h.data() + static_cast<std::size_t>(n) * n);
        std::vector<cplx> phases;
        ComplexReduction red = tridiag_complex(a, n, d, e, phases);
        std::vector<cplx> z;
        if (opt.want_vectors) {
            z.assign(static_cast<std::size_t>(n) * n, cplx(0.0));
            for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;
            accumulate_q_complex(a, n, red, phases, z);
        }
        cplx* zp = opt.want_vectors ? z.data() : nullptr;
        ql_implicit(d, e, n, opt.max_sweeps, zp, n);
        sort_spectrum(d, n, zp, n);
        spec.eigenvalues = std::move(d);
        if (opt.want_vectors) {
            spec.eigenvectors.resize(static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(static)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    spec.eigenvectors[static_cast<std::size_t>(j) * n + i] =
                        z[static_cast<std::size_t>(i) * n + j];
        }
    }

    if (opt.want_vectors) {
        fix_phases(spec.eigenvectors, n);
        if (opt.check_residual) {
            spec.residual_bound = compute_residual_bound(h, spec);
            double tol = default_tol(h, opt.tol);
            if (spec.residual_bound > tol)
                throw EigenIterationError("eigen_full residual " + fmt_g(spec.residual_bound) +
                                          " exceeds tolerance " + fmt_g(tol));
        }
    }
    return spec;
}

Spectrum eigen_full(const HermitianMatrix& h, bool want_vectors, double tol) {
    EigenOptions opt;
    opt.want_vectors = want_vectors;
    opt.tol = tol;
    return eigen_full(h, opt);
}

TridiagFactor tridiagonalize(const HermitianMatrix& h) {
    const int n = h.n();
    TridiagFactor f;
    f.n = n;
    std::vector<cplx> a(h.data(), h.data() + static_cast<std::size_t>(n) * n);
    std::vector<cplx> phases;
    ComplexReduction red = tridiag_complex(a, n, f.diag, f.sub, phases);
    f.q.assign(static_cast<std::size_t>(n) * n, cplx(0.0));
    for (int i = 0; i < n; ++i) f.q[static_cast<std::size_t>(i) * n + i] = 1.0;
    accumulate_q_complex(a, n, red, phases, f.q);
    return f;
}

namespace {

// eigenvalues and bottom eigenvector components of a small tridiagonal (for
// Lanczos Ritz residuals). Only the last row of the eigenvector matrix is
// carried through the rotations, which keeps each call at O(m^2).
void small_tridiag_eig(std::vector<double> d, std::vector<double> e, int m,
                       std::vector<double>& theta, std::vector<double>& bottom) {
    std::vector<double> row(m, 0.0);
    row[m - 1] = 1.0;
    ql_implicit(d, e, m, 80, row.data(), 1);
    sort_spectrum(d, m, row.data(), 1);
    theta = std::move(d);
    bottom.resize(m);
    for (int j = 0; j < m; ++j) bottom[j] = std::abs(row[j]);
}

}  // namespace

ExtremeResult lambda_extreme(const HermitianMatrix& h, WhichExtreme which, double tol,
                             int max_iter, CounterRng& rng) {
    const int n = h.n();
    if (n < 1) throw std::invalid_argument("lambda_extreme: empty matrix");
    if (n == 1) return {h(0, 0).real(), 0.0, 0};
    if (tol <= 0.0) tol = default_tol(h, 0.0);
    const int cap = std::min(max_iter, n);

    std::vector<std::vector<cplx>> basis;
    std::vector<double> alphas, betas;
    std::vector<cplx> v(n), w(n), vprev(n, cplx(0.0));
    const double breakdown = 1e-13 * std::sqrt(h.frobenius_norm2() + 1.0);

    bool restarted = false;
    double best = 0.0, best_res = std::numeric_limits<double>::infinity();

    auto start_vector = [&](std::vector<cplx>& out) {
        rng.next_complex_sphere(out.data(), n);
        // orthogonalize against existing basis (for restarts)
        for (const auto& b : basis) {
            cplx proj = 0.0;
            for (int i = 0; i < n; ++i) proj += std::conj(b[i]) * out[i];
            for (int i = 0; i < n; ++i) out[i] -= proj * b[i];
        }
        double norm = 0.0;
        for (int i = 0; i < n; ++i) norm += std::norm(out[i]);
        norm = std::sqrt(norm);
        for (int i = 0; i < n; ++i) out[i] /= norm;
    };

    start_vector(v);
    int iters = 0;
    while (iters < cap) {
        h.matvec(v.data(), w.data());
        cplx avc = 0.0;
        for (int i = 0; i < n; ++i) avc += std::conj(v[i]) * w[i];
        double alpha = avc.real();
        double beta_prev = betas.empty() ? 0.0 : betas.back();
        for (int i = 0; i < n; ++i) w[i] -= alpha * v[i] + beta_prev * vprev[i];
        // full reorthogonalization against every stored basis vector
        for (const auto& b : basis) {
            cplx proj = 0.0;
            for (int i = 0; i < n; ++i) proj += std::conj(b[i]) * w[i];
            for (int i = 0; i < n; ++i) w[i] -= proj * b[i];
        }
        {
            cplx proj = 0.0;
            for (int i = 0; i < n; ++i) proj += std::conj(v[i]) * w[i];
            for (int i = 0; i < n; ++i) w[i] -= proj * v[i];
        }
        alphas.push_back(alpha);
        basis.push_back(v);
        ++iters;

        double beta = 0.0;
        for (int i = 0; i < n; ++i) beta += std::norm(w[i]);
        beta = std::sqrt(beta);

        const int m = static_cast<int>(alphas.size());
        std::vector<double> theta, bottom;
        small_tridiag_eig(alphas, betas, m, theta, bottom);
        double value, res;
        if (which == WhichExtreme::Max) {
            value = theta[m - 1];
            res = beta * bottom[m - 1];
        } else if (which == WhichExtreme::Min) {
            value = theta[0];
            res = beta * bottom[0];
        } else {
            double rlo = beta * bottom[0], rhi = beta * bottom[m - 1];
            if (std::abs(theta[0]) > std::abs(theta[m - 1])) {
                value = std::abs(theta[0]);
                res = std::max(rlo, rhi);
            } else {
                value = std::abs(theta[m - 1]);
                res = std::max(rlo, rhi);
            }
        }
        if (res < best_res) {
            best = value;
            best_res = res;
        }
        if (res <= tol) return {value, res, iters};

        if (beta <= breakdown || m == n) {
            // invariant subspace: Ritz values are exact on it
            if (beta <= breakdown && m < n && !restarted) {
                restarted = true;
                start_vector(v);
                betas.push_back(0.0);
                std::fill(vprev.begin(), vprev.end(), cplx(0.0));
                continue;
            }
            return {value, std::min(res, beta), iters};
        }
        betas.push_back(beta);
        vprev = v;
        for (int i = 0; i < n; ++i) v[i] = w[i] / beta;
    }
    throw ConvergenceError("Lanczos residual " + fmt_g(best_res) + " above tolerance " +
                               fmt_g(tol) + " after " + std::to_string(cap) + " iterations",
                           best, best_res);
}

double spectral_radius(const HermitianMatrix& h) {
    const int n = h.n();
    if (n <= 64) {
        Spectrum s = eigen_full(h, false);
        return s.spectral_radius();
    }
    CounterRng rng(0x5BEC47A1ull, 0);
    ExtremeResult r = lambda_extreme(h, WhichExtreme::SpectralRadius, 0.0, 400, rng);
    return r.value;
}

}  // namespace bandlab
