#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cylwiener {

// SplitMix64 step; used to derive decorrelated substream seeds so that
// each (path, coordinate) pair gets an independent engine regardless of
// evaluation order or thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t path, std::uint64_t k) {
    return splitmix64(splitmix64(splitmix64(seed) ^ path) ^ k);
}

// Marsaglia polar method on top of a 53-bit uniform. Unlike
// std::normal_distribution, the output sequence is pinned by this code and
// therefore bit-reproducible across standard libraries.
class GaussianDraw {
public:
    template <class Engine>
    double operator()(Engine& eng) {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform(eng) - 1.0;
            v = 2.0 * uniform(eng) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_ = true;
        return u * m;
    }

    template <class Engine>
    static double uniform(Engine& eng) {
        return static_cast<double>(eng() >> 11) * 0x1.0p-53;
    }

private:
    bool have_ = false;
    double spare_ = 0.0;
};

}  // namespace cylwiener
