#include "bestofn/hash.hpp"

#include <cstdio>
#include <cstring>

namespace bestofn {

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

HashBuilder& HashBuilder::field(std::string_view value) {
    h_ = fnv1a64(value, field(static_cast<std::uint64_t>(value.size())).h_);
    return *this;
}

HashBuilder& HashBuilder::field(std::uint64_t value) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    h_ = fnv1a64(std::string_view(bytes, 8), h_);
    return *this;
}

HashBuilder& HashBuilder::field(double value) {
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    return field(bits);
}

} // namespace bestofn
