// Compares the serial reference kernels against the OpenMP production paths.
#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "bandlab/eigen.hpp"
#include "bandlab/ensemble.hpp"
#include "bandlab/reference.hpp"
#include "bandlab/walks.hpp"

using namespace bandlab;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-34s %10.1f ms %10.1f ms %8.2fx\n", name, serial_s * 1e3, parallel_s * 1e3,
                serial_s / parallel_s);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());
    std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    EntryLaw gauss = EntryLaw::gaussian_real();
    EntryLaw cgauss = EntryLaw::gaussian_complex();

    {
        SparsityPattern pat = SparsityPattern::cyclic_band(2000, 401);
        double ts = time_best_of(3, [&] { ref::sample_matrix(gauss, pat, 7); });
        double tp = time_best_of(3, [&] { HermitianMatrix::sample(gauss, pat, 7); });
        report("sample n=2000 w=401", ts, tp);
    }
    {
        SparsityPattern pat = SparsityPattern::full(2000);
        HermitianMatrix h = HermitianMatrix::sample(gauss, pat, 3);
        std::vector<std::complex<double>> x(2000, {1.0, 0.0}), y(2000);
        double ts = time_best_of(5, [&] {
            for (int r = 0; r < 20; ++r) ref::matvec(h, x.data(), y.data());
        });
        double tp = time_best_of(5, [&] {
            for (int r = 0; r < 20; ++r) h.matvec(x.data(), y.data());
        });
        report("matvec n=2000 x20", ts, tp);
    }
    {
        SparsityPattern pat = SparsityPattern::full(260);
        HermitianMatrix h = HermitianMatrix::sample(gauss, pat, 11);
        double ts = time_best_of(1, [&] { ref::eigenvalues_jacobi(h); });
        double tp = time_best_of(1, [&] { eigen_full(h, false); });
        report("eigenvalues n=260 (jacobi vs QL)", ts, tp);
    }
    {
        SparsityPattern pat = SparsityPattern::full(900);
        HermitianMatrix h = HermitianMatrix::sample(gauss, pat, 5);
        double tp = time_best_of(1, [&] { eigen_full(h, true); });
        std::printf("%-34s %13s %10.1f ms\n", "full eigenvectors n=900 (real)", "-", tp * 1e3);
    }
    {
        SparsityPattern pat = SparsityPattern::full(500);
        HermitianMatrix h = HermitianMatrix::sample(cgauss, pat, 5);
        double tp = time_best_of(1, [&] { eigen_full(h, true); });
        std::printf("%-34s %13s %10.1f ms\n", "full eigenvectors n=500 (complex)", "-", tp * 1e3);
    }
    {
        SparsityPattern pat = SparsityPattern::full(160);
        HermitianMatrix h = HermitianMatrix::sample(gauss, pat, 13);
        double ts = time_best_of(3, [&] { ref::trace_power_2k(h, 3); });
        double tp = 0.0;
        // the production path estimates over sampled trials; time one trial
        // of the same power computation through the Monte Carlo route
        tp = time_best_of(3, [&] {
            trace_moment_mc(gauss, pat, 3, 1, 13);
        });
        report("trace X^6 n=160", ts, tp);
    }
    return 0;
}
