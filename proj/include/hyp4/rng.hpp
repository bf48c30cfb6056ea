#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace hyp4 {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// FNV-1a, used to separate the streams of different suites.
inline std::uint64_t hash_name(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
    return h;
}

// mt19937_64 seeded through splitmix64 from (seed, stream, trial). The engine's output sequence is
// fixed by the C++ standard; the real-valued mappings below are local so no library distribution
// is involved.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
        : eng_(splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ splitmix64(trial + 0x632BE59BD9B4E019ull))) {}

    std::uint64_t bits() { return eng_(); }
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double normal() {
        double u1 = unit(), u2 = unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace hyp4
