#pragma once

#include <cmath>
#include <cstdint>

namespace physevo {

/// Counter-based pseudorandom stream (SplitMix64 family).
///
/// The generator keeps no hidden state beyond (key, counter): draw n is a pure
/// function of (seed, stream_id, n), so streams are splittable and any draw
/// sequence can be replayed exactly. Distinct stream_ids derive distinct keys.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(derive_key(seed, stream_id)), counter_(0), has_cached_normal_(false), cached_normal_(0.0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (second value cached).
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(theta);
        has_cached_normal_ = true;
        return r * std::cos(theta);
    }

    /// Child stream with an independent key, derived deterministically.
    RngStream split(std::uint64_t stream_id) const { return RngStream(key_, stream_id); }

  private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
    bool has_cached_normal_;
    double cached_normal_;
};

}  // namespace physevo
