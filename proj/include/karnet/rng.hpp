#ifndef KARNET_RNG_HPP
#define KARNET_RNG_HPP

#include <cstdint>

namespace karnet {

/// One step of the splitmix64 mixer (Steele, Lea, Flood; public domain).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a master seed and two indices
/// (for example trial and fold), so each run is individually reproducible.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ (a + 1)) ^ (b + 1));
}

}  // namespace karnet

#endif
