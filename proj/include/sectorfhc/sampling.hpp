#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

namespace sectorfhc {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the substream addressed by `path` under `seed`: each component is
/// folded in with splitmix64, so (seed, a, b) and (seed, b, a) differ.
std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// 64-bit Mersenne twister with a portable conversion to [0, 1).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() noexcept { return engine_(); }
    std::uint64_t below(std::uint64_t n) noexcept { return n == 0 ? 0 : engine_() % n; }

private:
    std::mt19937_64 engine_;
};

/// Worker count used when a caller passes 0.
unsigned default_workers() noexcept;

/// Runs body(i) for i in [0, count) on up to `workers` threads. Items are
/// split into contiguous chunks; body must be safe to call concurrently for
/// distinct i and should write only to per-item storage.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

} // namespace sectorfhc
