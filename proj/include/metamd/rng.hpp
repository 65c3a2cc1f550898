#pragma once

#include <cstdint>

namespace metamd {

/// splitmix64 step; used for seed expansion and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator. One instance per thread of execution; independent
/// streams come from derive(), never from sharing an instance.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& si : s_) si = splitmix64(sm);
    }

    /// Deterministic stream for (master seed, scenario, replication).
    static Rng derive(std::uint64_t master, std::uint64_t scenario, std::uint64_t replication) {
        std::uint64_t sm = master;
        std::uint64_t a = splitmix64(sm) ^ (scenario * 0xd1342543de82ef95ULL);
        std::uint64_t b = splitmix64(sm) ^ (replication * 0x2545f4914f6cdd1dULL);
        std::uint64_t mix = a;
        mix ^= splitmix64(b);
        return Rng(mix ^ splitmix64(a));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0,1); safe as input to inverse CDFs.
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace metamd
