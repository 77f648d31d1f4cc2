#pragma once

#include <cstdint>
#include <random>

namespace lotama {

using Rng = std::mt19937_64;

// splitmix64 mixer; used to derive independent child seeds from a base seed
// plus a stream tag so every consumer (batch t, eval, init, ...) gets its own
// reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return mix_seed(mix_seed(base) ^ mix_seed(tag));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b) {
    return mix_seed(derive_seed(base, tag_a) ^ mix_seed(tag_b + 0x632be59bd9b4e019ULL));
}

// Stream tags for the named consumers.
namespace stream {
constexpr std::uint64_t kInit = 0x11;
constexpr std::uint64_t kTrainBatch = 0x22;   // combined with the step index
constexpr std::uint64_t kEval = 0x33;
constexpr std::uint64_t kRegret = 0x44;
constexpr std::uint64_t kUsage = 0x55;
constexpr std::uint64_t kReserveTrain = 0x66;
constexpr std::uint64_t kReserveTest = 0x77;
constexpr std::uint64_t kTicket = 0x88;
}  // namespace stream

}  // namespace lotama
