#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace widthlab {

/// Malformed or inconsistent configuration input. CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A runtime invariant check failed mid-computation. CLI maps this to exit code 2.
class InvariantError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t splitmix64_step(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-task seed derived from a master seed and a task index.
/// Used wherever work is fanned out (sweep cells, sampler trials) so that
/// concurrent and serial schedules draw identical randomness.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64_step(s);
    std::uint64_t b = splitmix64_step(s);
    return a ^ (b << 1);
}

/// Small self-contained generator (splitmix64 stream). The std <random>
/// distributions are implementation-defined; this keeps every sampled value
/// bit-reproducible across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() noexcept { return splitmix64_step(state_); }

    /// Uniform in [0, 1).
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (two draws per value, no caching).
    double normal() noexcept;

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) noexcept {
        return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// +1 or -1 with equal probability.
    double sign() noexcept { return (next_u64() & 1u) ? 1.0 : -1.0; }

  private:
    std::uint64_t state_;
};

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Falls back to a
/// serial loop for jobs <= 1. The first exception thrown by any body is
/// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace widthlab
