#pragma once
#include <cmath>
#include <cstdint>
#include <random>

namespace icsr {

// Seeded RNG with a platform-independent gaussian (Box-Muller on raw
// 53-bit uniforms, no cached spare) so generated datasets are
// byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]
    double uniform_open() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian() {
        double u1 = uniform_open();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is negligible for n << 2^64 and keeps the stream simple
        return eng_() % n;
    }

    std::mt19937_64& engine() { return eng_; }
    const std::mt19937_64& engine() const { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace icsr
