#pragma once

#include <cstdint>
#include <random>

namespace colsched {

/// SplitMix64 finalizer; used only to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream identifiers. Each stochastic source owns one stream so that a
/// change in one consumer never shifts the draws of another.
namespace stream {
constexpr std::uint64_t adaptive_arrivals(int user) { return 0x1000ULL + static_cast<std::uint64_t>(user); }
constexpr std::uint64_t uncoop_arrivals(int channel) { return 0x2000ULL + static_cast<std::uint64_t>(channel); }
constexpr std::uint64_t channel_gate(int channel) { return 0x3000ULL + static_cast<std::uint64_t>(channel); }
constexpr std::uint64_t scheduler = 0x4000ULL;
}  // namespace stream

/// Seed of stream `id` under master seed `master`:
/// splitmix64(master ^ splitmix64(id)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id) {
    return splitmix64(master ^ splitmix64(id));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(std::uint64_t master, std::uint64_t id) : engine_(derive_seed(master, id)) {}

    /// Uniform on [0, 1) with 53 random bits; platform independent.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace colsched
