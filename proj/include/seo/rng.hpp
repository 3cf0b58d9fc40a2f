#pragma once

#include <cstdint>
#include <random>

namespace seo {

// Name recorded in artifact metadata so a run can be reproduced elsewhere.
inline constexpr const char* kRngAlgorithm =
    "mt19937_64 seeded via splitmix64; std::normal_distribution (libstdc++)";

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-point seed for sweeps: adding points never reshuffles existing ones.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return seed ^ splitmix64(index);
}

class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace seo
