#pragma once

#include <cstdint>

namespace gpanel {

// All randomness in the library flows through SplitMix64 used in counter
// mode: the n-th draw of a stream with key k is mix(k + (n+1)*GOLDEN), where
// mix is the Stafford variant-13 finalizer. Counter mode gives O(1) random
// access and makes draws a pure function of (key, index), which is what the
// reproducibility and schedule-independence contracts rely on.
inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds one 64-bit word into a key.
constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t word) {
    return mix64(key ^ (kGoldenGamma * (word + 1)));
}

class CounterRng {
  public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t at(std::uint64_t index) const {
        return mix64(key_ + (index + 1) * kGoldenGamma);
    }

    std::uint64_t next_u64() { return at(index_++); }

    // Uniform on the open interval (0,1): top 53 bits, offset by half an ulp
    // so the inverse-CDF samplers never see 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
    std::uint64_t index_ = 0;
};

// Stream key of panel cell (unit, time). Independent of the panel dimensions,
// so panels of different sizes share their low-index draws.
constexpr std::uint64_t cell_key(std::uint64_t seed, std::uint64_t unit, std::uint64_t time) {
    return combine(combine(seed, unit), time);
}

}  // namespace gpanel
