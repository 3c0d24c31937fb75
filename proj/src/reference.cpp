#include "bandlab/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bandlab::ref {

namespace {
using cplx = std::complex<double>;
}

HermitianMatrix sample_matrix(const EntryLaw& law, const SparsityPattern& pattern,
                              std::uint64_t seed) {
    const int n = pattern.n();
    std::vector<cplx> values(static_cast<std::size_t>(n) * n, cplx(0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (!pattern.allowed(i, j)) continue;
            CounterRng rng(seed, static_cast<std::uint64_t>(i) * n + j);
            cplx v = (i == j) ? cplx(law.sample_real(rng), 0.0) : law.sample(rng);
            values[static_cast<std::size_t>(i) * n + j] = v;
            values[static_cast<std::size_t>(j) * n + i] = std::conj(v);
        }
    }
    return HermitianMatrix::from_dense(pattern, std::move(values));
}

void matvec(const HermitianMatrix& h, const cplx* x, cplx* y) {
    const int n = h.n();
    for (int i = 0; i < n; ++i) {
        const cplx* row = h.row(i);
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

std::vector<double> eigenvalues_jacobi(const HermitianMatrix& h, int max_sweeps) {
    const int n = h.n();
    // realified dimension
    const bool real = h.is_real();
    const int m = real ? n : 2 * n;
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    if (real) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i) * m + j] = h(i, j).real();
    } else {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double re = h(i, j).real(), im = h(i, j).imag();
                a[static_cast<std::size_t>(i) * m + j] = re;
                a[static_cast<std::size_t>(i) * m + (n + j)] = -im;
                a[static_cast<std::size_t>(n + i) * m + j] = im;
                a[static_cast<std::size_t>(n + i) * m + (n + j)] = re;
            }
        }
    }

    auto off = [&]() {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) s += a[static_cast<std::size_t>(i) * m + j] *
                                                  a[static_cast<std::size_t>(i) * m + j];
        return s;
    };
    double total = 0.0;
    for (double v : a) total += v * v;
    const double stop = 1e-26 * (total > 0.0 ? total : 1.0);

    for (int sweep = 0; sweep < max_sweeps && off() > stop; ++sweep) {
        for (int p = 0; p < m - 1; ++p) {
            for (int q = p + 1; q < m; ++q) {
                double apq = a[static_cast<std::size_t>(p) * m + q];
                if (apq == 0.0) continue;
                double app = a[static_cast<std::size_t>(p) * m + p];
                double aqq = a[static_cast<std::size_t>(q) * m + q];
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < m; ++k) {
                    double akp = a[static_cast<std::size_t>(k) * m + p];
                    double akq = a[static_cast<std::size_t>(k) * m + q];
                    a[static_cast<std::size_t>(k) * m + p] = c * akp - s * akq;
                    a[static_cast<std::size_t>(k) * m + q] = s * akp + c * akq;
                }
                for (int k = 0; k < m; ++k) {
                    double apk = a[static_cast<std::size_t>(p) * m + k];
                    double aqk = a[static_cast<std::size_t>(q) * m + k];
                    a[static_cast<std::size_t>(p) * m + k] = c * apk - s * aqk;
                    a[static_cast<std::size_t>(q) * m + k] = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> ev(m);
    for (int i = 0; i < m; ++i) ev[i] = a[static_cast<std::size_t>(i) * m + i];
    std::sort(ev.begin(), ev.end());
    if (real) return ev;
    // doubled spectrum: take every second value
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
    return out;
}

double trace_power_2k(const HermitianMatrix& h, int k) {
    const int n = h.n();
    if (k < 1) throw std::invalid_argument("trace_power_2k: k must be >= 1");
    std::vector<cplx> cur(h.data(), h.data() + static_cast<std::size_t>(n) * n);
    std::vector<cplx> next(cur.size());
    for (int step = 1; step < k; ++step) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                cplx s = 0.0;
                for (int t = 0; t < n; ++t)
                    s += h.row(i)[t] * cur[static_cast<std::size_t>(t) * n + j];
                next[static_cast<std::size_t>(i) * n + j] = s;
            }
        }
        std::swap(cur, next);
    }
    long double fro2 = 0.0;
    for (const cplx& v : cur) fro2 += static_cast<long double>(std::norm(v));
    return static_cast<double>(fro2);
}

}  // namespace bandlab::ref
