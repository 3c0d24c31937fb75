#ifndef BANDLAB_RNG_HPP
#define BANDLAB_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace bandlab {

// Philox4x64-10 block cipher (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Stateless: a (key, counter) pair maps to 4 output words.
// Matches the reference/NumPy implementation bit for bit.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

// Stable seed derivation for nested experiment structure:
// master seed -> experiment tag -> grid point -> trial. Chained splitmix64
// finalizers over the tag hash and indices; stable across platforms/runs.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t grid_index, std::uint64_t trial_index);

// One pseudo-random stream identified by (seed, stream id). Draws advance a
// private block counter only, so distinct streams never interact: sampling a
// matrix in any row order or thread partition gives identical entries.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{seed, stream}, block_{0}, pos_(4) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    // uniform on [0,1), 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1], suitable as a log() argument
    double next_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // standard normal via Box-Muller; second value of each pair is cached
    double next_gauss();

    // uniform point on the unit sphere of C^n (2n independent normals, scaled)
    void next_complex_sphere(std::complex<double>* out, int n);

  private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_;
    std::array<std::uint64_t, 4> buf_{};
    int pos_;
    bool have_cached_gauss_ = false;
    double cached_gauss_ = 0.0;
};

}  // namespace bandlab

#endif
