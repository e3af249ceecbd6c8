#pragma once

#include <cmath>
#include <cstdint>

namespace gsmc {

// Small deterministic PRNG. std::mt19937 would do, but the standard
// distributions are implementation-defined, and the layout optimizer
// needs bit-identical streams per (seed, pass, block) on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Mixes a tuple of values into one 64-bit stream seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                              std::uint64_t d = 0) {
    SplitMix64 m(a);
    std::uint64_t s = m.next();
    s ^= SplitMix64(b ^ 0x9e3779b97f4a7c15ULL).next() + 0x632be59bd9b4e019ULL + (s << 6);
    s ^= SplitMix64(c ^ 0xd1b54a32d192ed03ULL).next() + 0x9e3779b97f4a7c15ULL + (s >> 2);
    s ^= SplitMix64(d ^ 0x8cb92ba72f3d8dd7ULL).next() + (s << 13);
    return s;
}

template <typename T, typename Rng>
void shuffle(T* data, std::size_t n, Rng& rng) {
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        T tmp = data[i - 1];
        data[i - 1] = data[j];
        data[j] = tmp;
    }
}

} // namespace gsmc
