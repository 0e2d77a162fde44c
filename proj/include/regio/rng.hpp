#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace regio {

/// SplitMix64 finalizer, used to derive independent sub-seeds.
constexpr uint64_t mix64(uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr uint64_t derive_seed(uint64_t master, uint64_t stream) noexcept
{
    return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// xoshiro256** generator with platform-independent uniform and normal draws.
/// The standard library distributions are implementation-defined, so outputs
/// would differ between toolchains; everything here is specified bit for bit.
class Rng
{
public:
    explicit Rng(uint64_t seed) noexcept
    {
        uint64_t s = seed;
        for (auto& word : _state) {
            s    = mix64(s);
            word = s;
        }
    }

    uint64_t next() noexcept
    {
        const uint64_t result = rotl(_state[1] * 5, 7) * 9;
        const uint64_t t      = _state[1] << 17;
        _state[2] ^= _state[0];
        _state[3] ^= _state[1];
        _state[1] ^= _state[2];
        _state[0] ^= _state[3];
        _state[2] ^= t;
        _state[3] = rotl(_state[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() noexcept
    {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept
    {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n), n > 0. Lemire's rejection keeps it unbiased.
    uint64_t below(uint64_t n) noexcept
    {
        __uint128_t m = static_cast<__uint128_t>(next()) * n;
        auto low      = static_cast<uint64_t>(m);
        if (low < n) {
            const uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m   = static_cast<__uint128_t>(next()) * n;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() noexcept
    {
        if (_hasSpare) {
            _hasSpare = false;
            return _spare;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r  = std::sqrt(-2.0 * std::log(u1));
        const double a  = 2.0 * std::numbers::pi * u2;
        _spare          = r * std::sin(a);
        _hasSpare       = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) noexcept
    {
        return mean + sd * normal();
    }

private:
    static constexpr uint64_t rotl(uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t _state[4];
    double _spare  = 0.0;
    bool _hasSpare = false;
};

}
