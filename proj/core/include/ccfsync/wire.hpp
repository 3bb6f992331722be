#ifndef CCFSYNC_WIRE_HPP
#define CCFSYNC_WIRE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ccfsync/multiset.hpp"

namespace ccfsync {

// Frame layout (big-endian): type u8, payload length u32, payload.
enum class FrameType : uint8_t {
    kHello = 0x01,
    kFilter = 0x02,
    kDiff = 0x03,
    kDone = 0x04,
    kError = 0x7F,
};

enum class SyncMethod : uint8_t {
    kCcfQuery = 1,
    kCcfDecode = 2,
    kCbf = 3,
};

struct Frame {
    FrameType type;
    std::vector<uint8_t> payload;

    size_t encoded_size() const { return 5 + payload.size(); }

    friend bool operator==(const Frame&, const Frame&) = default;
};

constexpr uint8_t kProtocolVersion = 1;

// HELLO: protocol version u8, method u8, filter params blob.
Frame make_hello(SyncMethod method, const std::vector<uint8_t>& params_blob);
struct Hello {
    uint8_t version;
    SyncMethod method;
    std::vector<uint8_t> params_blob;
};
Hello parse_hello(const Frame& frame);

// FILTER: a serialized filter as-is.
Frame make_filter(std::vector<uint8_t> serialized);

// DIFF: entry count u32, then per entry elem length u16, elem bytes,
// multiplicity u32.
Frame make_diff(const EntryList& entries);
EntryList parse_diff(const Frame& frame);

// DONE: locally computed accuracy estimate as IEEE-754 f64.
Frame make_done(double alpha);
double parse_done(const Frame& frame);

// ERROR: UTF-8 message.
Frame make_error(const std::string& message);
std::string parse_error_frame(const Frame& frame);

std::vector<uint8_t> encode_frame(const Frame& frame);

}  // namespace ccfsync

#endif  // CCFSYNC_WIRE_HPP
