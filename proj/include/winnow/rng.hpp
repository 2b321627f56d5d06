#pragma once

#include <cstdint>
#include <vector>

namespace winnow {

// Deterministic 64-bit generator, bit-exact on every platform.
//
// State advance and output follow the splitmix64 reference:
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Reimplementations in other languages must reproduce this stream exactly.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Plain modulo: the bias is immaterial next to the
    // requirement that every platform draws the same value.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// splitmix64 output function applied to a single value (stateless mixer).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream-independent child seed: used for per-resample / per-band seeding so
// parallel consumers stay deterministic.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base + 0x9E3779B97F4A7C15ULL * (index + 1));
}

// In-place Fisher-Yates driven by SeededRng(seed): i from n-1 down to 1,
// j = next() % (i+1), swap(v[i], v[j]).
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
    SeededRng rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

// FNV-1a over raw bytes; base hash for shingles and bucket keys.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace winnow
