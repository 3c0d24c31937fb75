#ifndef BANDLAB_REFERENCE_HPP
#define BANDLAB_REFERENCE_HPP

#include <complex>
#include <vector>

#include "bandlab/ensemble.hpp"

// Plain serial implementations of the parallel kernels. They are kept as
// oracles for the threaded code paths and as baselines for bandlab_bench.
// sample_matrix and matvec must match the parallel versions bit for bit;
// eigenvalues_jacobi is an algorithmically independent eigensolver.
namespace bandlab::ref {

HermitianMatrix sample_matrix(const EntryLaw& law, const SparsityPattern& pattern,
                              std::uint64_t seed);

void matvec(const HermitianMatrix& h, const std::complex<double>* x, std::complex<double>* y);

// Cyclic Jacobi rotations; complex Hermitian input is embedded as the real
// symmetric [[A,-B],[B,A]] whose spectrum is the original one doubled.
std::vector<double> eigenvalues_jacobi(const HermitianMatrix& h, int max_sweeps = 100);

// Tr H^(2k) via repeated dense serial multiplication (= ||H^k||_F^2).
double trace_power_2k(const HermitianMatrix& h, int k);

}  // namespace bandlab::ref

#endif
