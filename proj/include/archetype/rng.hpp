#pragma once

#include <cstdint>
#include <cmath>
#include <utility>

namespace arch {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based generator: output i is a pure function of (seed, stream, i),
/// i.e. the splitmix64 finalizer applied at key + (i+1)·golden. Streams keyed
/// off the same seed are decorrelated, draws can be addressed by counter
/// (seek), and results are identical across platforms.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(detail::mix64(detail::mix64(seed + 0x9E3779B97F4A7C15ull) ^
                             detail::mix64(stream + 0xD1B54A32D192ED03ull))) {}

    std::uint64_t next_u64() {
        ++counter_;
        return detail::mix64(key_ + counter_ * 0x9E3779B97F4A7C15ull);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1); safe as a log argument.
    double next_unit_open() {
        return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Box–Muller pair of independent standard normals (2 uniforms consumed).
    std::pair<double, double> next_normal_pair() {
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Single standard normal (consumes a full pair's uniforms).
    double next_normal() { return next_normal_pair().first; }

    std::uint64_t counter() const { return counter_; }
    void seek(std::uint64_t counter) { counter_ = counter; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Fold (seed, stream) into a fresh 64-bit seed; used to hand independent
/// seeds to parallel trials while keeping runs reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(detail::mix64(seed ^ 0xA0761D6478BD642Full) +
                         stream * 0x9E3779B97F4A7C15ull);
}

}  // namespace arch
