#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bestofn {

// FNV-1a, 64-bit. Used for config fingerprints, cache keys, and the mock's
// content-derived defaults. Not cryptographic; collisions are irrelevant at
// the scale of one evaluation run.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

// Canonical multi-field hashing: every field is length-prefixed so that
// ("ab","c") and ("a","bc") never collide by concatenation.
class HashBuilder {
public:
    HashBuilder& field(std::string_view value);
    HashBuilder& field(std::uint64_t value);
    HashBuilder& field(double value);
    std::uint64_t digest() const noexcept { return h_; }
    std::string hex() const { return to_hex(h_); }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

} // namespace bestofn
