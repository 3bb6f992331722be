#include "ccfsync/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "ccfsync/bytes.hpp"
#include "ccfsync/errors.hpp"

namespace ccfsync {

namespace {

void expect_type(const Frame& frame, FrameType want, const char* name) {
    if (frame.type != want) {
        if (frame.type == FrameType::kError) {
            throw sync_error("peer error: " + parse_error_frame(frame));
        }
        throw sync_error(std::string("unexpected frame, wanted ") + name);
    }
}

}  // namespace

Frame make_hello(SyncMethod method, const std::vector<uint8_t>& params_blob) {
    ByteWriter w;
    w.u8(kProtocolVersion);
    w.u8(static_cast<uint8_t>(method));
    w.bytes(params_blob);
    return {FrameType::kHello, w.take()};
}

Hello parse_hello(const Frame& frame) {
    expect_type(frame, FrameType::kHello, "HELLO");
    ByteReader r(frame.payload);
    Hello h;
    h.version = r.u8();
    uint8_t method = r.u8();
    if (method < 1 || method > 3) {
        throw sync_error("unknown sync method " + std::to_string(method));
    }
    h.method = static_cast<SyncMethod>(method);
    h.params_blob.assign(frame.payload.begin() + 2, frame.payload.end());
    return h;
}

Frame make_filter(std::vector<uint8_t> serialized) {
    return {FrameType::kFilter, std::move(serialized)};
}

Frame make_diff(const EntryList& entries) {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(entries.size()));
    for (const auto& [x, count] : entries) {
        if (count > std::numeric_limits<uint32_t>::max()) {
            throw sync_error("diff multiplicity exceeds wire range");
        }
        w.u16(static_cast<uint16_t>(x.bytes().size()));
        w.bytes(x.bytes());
        w.u32(static_cast<uint32_t>(count));
    }
    return {FrameType::kDiff, w.take()};
}

EntryList parse_diff(const Frame& frame) {
    expect_type(frame, FrameType::kDiff, "DIFF");
    ByteReader r(frame.payload);
    uint32_t count = r.u32();
    EntryList out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint16_t len = r.u16();
        std::string bytes = r.bytes(len);
        uint32_t mult = r.u32();
        if (mult == 0) {
            throw sync_error("diff entry with zero multiplicity");
        }
        out.emplace_back(Element(std::move(bytes)), mult);
    }
    if (!r.done()) {
        throw sync_error("trailing bytes in DIFF payload");
    }
    return out;
}

Frame make_done(double alpha) {
    ByteWriter w;
    w.u64(std::bit_cast<uint64_t>(alpha));
    return {FrameType::kDone, w.take()};
}

double parse_done(const Frame& frame) {
    expect_type(frame, FrameType::kDone, "DONE");
    ByteReader r(frame.payload);
    return std::bit_cast<double>(r.u64());
}

Frame make_error(const std::string& message) {
    ByteWriter w;
    w.bytes(message);
    return {FrameType::kError, w.take()};
}

std::string parse_error_frame(const Frame& frame) {
    return std::string(frame.payload.begin(), frame.payload.end());
}

std::vector<uint8_t> encode_frame(const Frame& frame) {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(frame.type));
    w.u32(static_cast<uint32_t>(frame.payload.size()));
    w.bytes(frame.payload);
    return w.take();
}

}  // namespace ccfsync
