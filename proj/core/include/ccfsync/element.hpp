#ifndef CCFSYNC_ELEMENT_HPP
#define CCFSYNC_ELEMENT_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ccfsync/hash.hpp"

namespace ccfsync {

// Opaque byte-string key, 1..1024 bytes. Equality and ordering are byte-wise.
class Element {
public:
    static constexpr size_t kMaxBytes = 1024;

    explicit Element(std::string bytes) : bytes_(std::move(bytes)) {
        if (bytes_.empty() || bytes_.size() > kMaxBytes) {
            throw std::invalid_argument("element must be 1..1024 bytes");
        }
    }

    // Big-endian 4-byte encoding; the experiment workload uses 32-bit keys.
    static Element from_u32(uint32_t v) {
        std::string b(4, '\0');
        b[0] = static_cast<char>(v >> 24);
        b[1] = static_cast<char>(v >> 16);
        b[2] = static_cast<char>(v >> 8);
        b[3] = static_cast<char>(v);
        return Element(std::move(b));
    }

    const std::string& bytes() const { return bytes_; }
    std::string_view view() const { return bytes_; }

    friend auto operator<=>(const Element&, const Element&) = default;
    friend bool operator==(const Element&, const Element&) = default;

private:
    std::string bytes_;
};

struct ElementHash {
    size_t operator()(const Element& e) const {
        return static_cast<size_t>(hash64(e.view(), 0x5107a3f7c0ffee00ULL));
    }
};

}  // namespace ccfsync

#endif  // CCFSYNC_ELEMENT_HPP
