#pragma once

#include <cstdint>
#include <string_view>

namespace vdr {

// Deterministic, order-independent randomness. Every random decision in sim
// mode is a pure function of a key, never of scheduling order, so whole
// pipelines replay byte-identically at any concurrency level.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t hash_str(std::string_view s, std::uint64_t seed = 0) {
    std::uint64_t h = splitmix64(seed ^ 0xcbf29ce484222325ULL);
    for (unsigned char c : s) h = splitmix64(h ^ c);
    return h;
}

// Uniform in [0, 1).
inline double unit_real(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// A small counter-based stream for places that need several draws per key.
class DetRng {
  public:
    explicit DetRng(std::uint64_t key) : state_(splitmix64(key)) {}

    std::uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }
    // Inclusive bounds.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return lo + next() % (hi - lo + 1);
    }
    double uniform_real(double lo, double hi) {
        return lo + unit_real(next()) * (hi - lo);
    }
    bool chance(double p) { return unit_real(next()) < p; }

  private:
    std::uint64_t state_;
};

}  // namespace vdr
