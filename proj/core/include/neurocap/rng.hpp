#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace neurocap {

// 64-bit FNV-1a over arbitrary bytes. Used for seed-stream naming and
// content fingerprints.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// Expands one master seed into independent named streams (data/augment/
// init/tsne/...), so subsystems cannot perturb each other's draws.
class SeedStreams {
  public:
    explicit SeedStreams(std::uint64_t master_seed) : master_(master_seed) {}

    std::uint64_t seed_for(std::string_view name) const {
        return splitmix64(master_ ^ fnv1a64(name));
    }

    Rng stream(std::string_view name) const { return Rng(seed_for(name)); }

    std::uint64_t master() const { return master_; }

  private:
    std::uint64_t master_;
};

}  // namespace neurocap
