// Deterministic RNG utilities: splitmix64 stream derivation plus uniform and
// Gaussian (Box-Muller) variates with a fixed cross-platform layout.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace hbsc {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and up to two indices.
inline uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b = 0) {
    uint64_t s = root;
    uint64_t x = splitmix64(s) ^ (a * 0xD1B54A32D192ED03ull);
    s = x;
    x = splitmix64(s) ^ (b * 0x8CB92BA72F3D8DD7ull);
    s = x;
    return splitmix64(s);
}

struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next_u64() { return splitmix64(state); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]  (safe as a log argument)
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // bounded integer in [0, n)
    uint64_t bounded(uint64_t n) { return next_u64() % n; }

    // standard normal pair via Box-Muller
    void gaussian_pair(double& g0, double& g1) {
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        g0 = r * std::cos(t);
        g1 = r * std::sin(t);
    }

    double gaussian() {
        double a, b;
        gaussian_pair(a, b);
        return a;
    }
};

template <class T>
inline void fisher_yates(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace hbsc
