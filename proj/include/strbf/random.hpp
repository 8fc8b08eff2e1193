#pragma once

#include <cstdint>
#include <random>

namespace strbf {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Stable across platforms, used for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for run `index` under `base`. Depends only on the pair, so adding
/// runs never perturbs the seeds of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Independent sub-streams of one run seed.
enum class Stream : std::uint64_t { Noise = 1, RbfInit = 2, StrbfInit = 3 };

inline Rng make_stream(std::uint64_t run_seed, Stream s) {
    return Rng(derive_seed(run_seed, static_cast<std::uint64_t>(s)));
}

}  // namespace strbf
