#pragma once

#include <cstdint>
#include <cstring>
#include <random>
#include <string_view>
#include <vector>

namespace auvsim {

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

// Stream seed derivation rule (also documented in the seed manifest):
//   seed = splitmix64(master ^ fnv1a64(tag) ^ splitmix64(index + 0x1000))
inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index = 0) {
    return splitmix64(master ^ fnv1a64(tag.data(), tag.size()) ^ splitmix64(index + 0x1000));
}

// Seeded random stream. All simulation randomness flows through this wrapper;
// the helpers below avoid the implementation-defined std:: distributions so a
// seed reproduces the same draws everywhere.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine_(seed) {}

    uint64_t u64() { return engine_(); }

    // uniform on [lo, hi], inclusive bounds
    int uniform_int(int lo, int hi) {
        uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>((static_cast<unsigned __int128>(u64()) * range) >> 64);
    }

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // index draw from unnormalized nonnegative weights
    int discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace auvsim
