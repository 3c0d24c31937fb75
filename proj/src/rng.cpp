#include "bandlab/rng.hpp"

#include <cmath>

namespace bandlab {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    return static_cast<std::uint64_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
    std::array<std::uint64_t, 4> x = counter;
    std::uint64_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, hi1;
        std::uint64_t lo0 = mulhilo(kPhiloxM0, x[0], hi0);
        std::uint64_t lo1 = mulhilo(kPhiloxM1, x[2], hi1);
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return x;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t grid_index, std::uint64_t trial_index) {
    // FNV-1a over the tag, then chain the numeric levels through splitmix64
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    std::uint64_t s = splitmix64(master ^ h);
    s = splitmix64(s ^ grid_index);
    s = splitmix64(s ^ trial_index);
    return s;
}

void CounterRng::refill() {
    buf_ = philox4x64({block_++, 0, 0, 0}, key_);
    pos_ = 0;
}

double CounterRng::next_gauss() {
    if (have_cached_gauss_) {
        have_cached_gauss_ = false;
        return cached_gauss_;
    }
    double u1 = next_open();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_gauss_ = r * std::sin(a);
    have_cached_gauss_ = true;
    return r * std::cos(a);
}

void CounterRng::next_complex_sphere(std::complex<double>* out, int n) {
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double re = next_gauss();
        double im = next_gauss();
        out[i] = {re, im};
        norm2 += re * re + im * im;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) out[i] *= inv;
}

}  // namespace bandlab
