#pragma once

#include <cstdint>
#include <random>

namespace acd {

using RngSeed = std::uint64_t;

/// SplitMix64 finalizer; used to derive independent child seeds.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for child stream `index` of `base`. Pure function of its inputs, so
/// replication r always receives the same stream regardless of scheduling.
[[nodiscard]] constexpr RngSeed derive_seed(RngSeed base, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// One named random stream. A series (or a replication) owns exactly one.
class RandomStream {
public:
    using result_type = std::mt19937_64::result_type;

    explicit RandomStream(RngSeed seed) : engine_(splitmix64(seed)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace acd
