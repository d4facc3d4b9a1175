#pragma once
// Keyed 64-bit pseudorandom mixing shared by every seeded component
// (green lists, permutations, embeddings, sampling). Splittable-hash
// construction: iterated xor-shift-multiply. Not cryptographically secure.

#include <cstdint>
#include <span>
#include <string_view>

namespace wmlab {

// splitmix64 finalizer with an initial golden-ratio offset.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Absorb one value into a running PRF state.
constexpr std::uint64_t prf_absorb(std::uint64_t state, std::uint64_t v) noexcept {
    return mix64(state ^ v);
}

// Fold a token-id sequence into a PRF state.
inline std::uint64_t prf_absorb_ids(std::uint64_t state, std::span<const int> ids) noexcept {
    for (int id : ids) state = prf_absorb(state, static_cast<std::uint64_t>(static_cast<std::uint32_t>(id)));
    return state;
}

inline std::uint64_t hash_bytes(std::string_view s, std::uint64_t seed = 0) noexcept {
    std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ull);
    for (unsigned char c : s) h = prf_absorb(h, c);
    return h;
}

// Domain-separation salts. Distinct streams must never collide even
// under identical secrets and contexts.
namespace salt {
inline constexpr std::uint64_t green      = 0x4752454e4c495354ull;
inline constexpr std::uint64_t permute    = 0x5045524d55544154ull;
inline constexpr std::uint64_t embed      = 0x454d424544484153ull;
inline constexpr std::uint64_t sir_w1     = 0x5349525f57315f31ull;
inline constexpr std::uint64_t sir_w2     = 0x5349525f57325f32ull;
inline constexpr std::uint64_t sample     = 0x53414d504c455231ull;
inline constexpr std::uint64_t doc        = 0x444f435345454431ull;
inline constexpr std::uint64_t fingerprint = 0x46494e4745525052ull;
}  // namespace salt

// Reserved begin-of-text token used to left-pad watermark contexts.
inline constexpr std::uint64_t kBeginToken = 0x424547494e544f4bull;

// Deterministic splitmix64 stream. Value semantics, trivially copyable.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Modulo bias is < n/2^64, irrelevant at
    // vocabulary scale; determinism is what matters here.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        return n ? next() % n : 0;
    }

    bool next_bernoulli(double p) noexcept { return next_unit() < p; }

private:
    std::uint64_t state_;
};

}  // namespace wmlab
