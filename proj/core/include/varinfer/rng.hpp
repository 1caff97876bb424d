#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace varinfer {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-stream derivation: independent draws for (master, id)
/// pairs without any sequential state shared between streams.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    const std::uint64_t s = splitmix64(master_seed ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
    return std::mt19937_64{s};
}

/// Standard normal via Box-Muller; avoids reliance on the library
/// implementation of normal_distribution staying put across releases.
class NormalSampler {
public:
    explicit NormalSampler(std::mt19937_64& gen) : gen_(gen) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = unit_(gen_);
        } while (u1 <= 0.0);
        const double u2 = unit_(gen_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64& gen_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace varinfer
