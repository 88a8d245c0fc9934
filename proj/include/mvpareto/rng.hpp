#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace mvpareto {

/// xoshiro256++ keyed by (seed, stream index). Each replicate owns a stream, so
/// results do not depend on how replicates are split across threads.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t x = splitmix(seed) ^ (index * 0xD1B54A32D192ED03ull);
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ull;
            word = splitmix(x);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t out = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return out;
    }

    /// Uniform on the open interval (0, 1).
    double open_uniform() { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1p-52; }
    /// Exp(1) by inversion; strictly positive.
    double exponential() { return -std::log(open_uniform()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::uint64_t state_[4];
};

} // namespace mvpareto
