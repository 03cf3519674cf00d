#pragma once

#include <cmath>
#include <cstdint>

namespace subgm::rng {

// splitmix64 output mixer
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable key for an independent substream (root seed, domain tag, element index).
// Every random object in the project is generated from its own substream, so
// generation order is free to change (and to run in parallel) without changing
// a single output bit.
constexpr std::uint64_t substream(std::uint64_t root, std::uint64_t tag, std::uint64_t index) {
    return mix64(mix64(root ^ (0x9e3779b97f4a7c15ULL * (tag + 1))) + index);
}

// Counter-based splitmix64 stream. O(1) construction, deterministic, and
// entirely self-contained so outputs do not depend on the standard library.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]
    double next_unit_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // standard normal via Box-Muller, pairwise cached
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// domain tags for substream separation
inline constexpr std::uint64_t kTagMeasurementMatrix = 0x4d454153; // sensing matrices
inline constexpr std::uint64_t kTagNoise = 0x4e4f4953;             // noise vector
inline constexpr std::uint64_t kTagGroundTruth = 0x47545255;       // ground-truth basis
inline constexpr std::uint64_t kTagSpectrum = 0x53504543;          // eigenvalue draw
inline constexpr std::uint64_t kTagProbe = 0x50524f42;             // verifier probes

} // namespace subgm::rng
