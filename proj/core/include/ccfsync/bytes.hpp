#ifndef CCFSYNC_BYTES_HPP
#define CCFSYNC_BYTES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccfsync/errors.hpp"

namespace ccfsync {

// Big-endian byte packing shared by the filter formats and the wire frames.

class ByteWriter {
public:
    std::vector<uint8_t>& buffer() { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { uint_be(v, 2); }
    void u32(uint32_t v) { uint_be(v, 4); }
    void u64(uint64_t v) { uint_be(v, 8); }
    // Low `n` bytes of v, big-endian.
    void uint_be(uint64_t v, size_t n) {
        for (size_t i = n; i > 0; --i) {
            buf_.push_back(static_cast<uint8_t>(v >> ((i - 1) * 8)));
        }
    }
    void bytes(std::span<const uint8_t> b) {
        buf_.insert(buf_.end(), b.begin(), b.end());
    }
    void bytes(const std::string& s) {
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

private:
    std::vector<uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    uint8_t u8() { return static_cast<uint8_t>(uint_be(1)); }
    uint16_t u16() { return static_cast<uint16_t>(uint_be(2)); }
    uint32_t u32() { return static_cast<uint32_t>(uint_be(4)); }
    uint64_t u64() { return uint_be(8); }
    uint64_t uint_be(size_t n) {
        need(n);
        uint64_t v = 0;
        for (size_t i = 0; i < n; ++i) {
            v = (v << 8) | data_[pos_ + i];
        }
        pos_ += n;
        return v;
    }
    std::string bytes(size_t n) {
        need(n);
        std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return out;
    }

private:
    void need(size_t n) {
        if (remaining() < n) {
            throw parse_error(parse_error::kind::truncated,
                              "truncated payload");
        }
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace ccfsync

#endif  // CCFSYNC_BYTES_HPP
