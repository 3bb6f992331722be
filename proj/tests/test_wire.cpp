#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "ccfsync/errors.hpp"
#include "ccfsync/wire.hpp"

using namespace ccfsync;

TEST_CASE("frame encoding is type, length, payload") {
    Frame frame{FrameType::kFilter, {0xAA, 0xBB, 0xCC}};
    auto bytes = encode_frame(frame);
    REQUIRE(bytes.size() == 8);
    CHECK(bytes[0] == 0x02);
    CHECK(bytes[1] == 0);
    CHECK(bytes[2] == 0);
    CHECK(bytes[3] == 0);
    CHECK(bytes[4] == 3);
    CHECK(bytes[5] == 0xAA);
    CHECK(frame.encoded_size() == 8);
}

TEST_CASE("hello round-trips version, method and params blob") {
    std::vector<uint8_t> blob{1, 2, 3, 4, 5};
    Frame frame = make_hello(SyncMethod::kCcfDecode, blob);
    CHECK(frame.type == FrameType::kHello);

    Hello hello = parse_hello(frame);
    CHECK(hello.version == kProtocolVersion);
    CHECK(hello.method == SyncMethod::kCcfDecode);
    CHECK(hello.params_blob == blob);
}

TEST_CASE("hello with a truncated payload is rejected") {
    Frame frame = make_hello(SyncMethod::kCbf, {9});
    frame.payload.resize(1);
    CHECK_THROWS_AS(parse_hello(frame), parse_error);
    Frame wrong{FrameType::kDone, {}};
    CHECK_THROWS_AS(parse_hello(wrong), sync_error);
}

TEST_CASE("diff frames carry full element bytes and multiplicities") {
    EntryList entries{{Element(std::string("\x01\x02", 2)), 3},
                      {Element("long-element-key"), 70000}};
    Frame frame = make_diff(entries);
    CHECK(frame.type == FrameType::kDiff);
    EntryList back = parse_diff(frame);
    REQUIRE(back.size() == 2);
    CHECK(back[0].first == entries[0].first);
    CHECK(back[0].second == 3);
    CHECK(back[1].first == entries[1].first);
    CHECK(back[1].second == 70000);

    CHECK(parse_diff(make_diff({})).empty());
}

TEST_CASE("truncated diff payload is rejected") {
    Frame frame = make_diff({{Element("abc"), 2}});
    frame.payload.pop_back();
    CHECK_THROWS_AS(parse_diff(frame), parse_error);
}

TEST_CASE("done carries the accuracy estimate exactly") {
    for (double alpha : {0.0, 0.5, 0.99999, 1.0}) {
        CHECK(parse_done(make_done(alpha)) == alpha);
    }
}

TEST_CASE("error frames carry a utf-8 message") {
    Frame frame = make_error("filter parameter mismatch");
    CHECK(frame.type == FrameType::kError);
    CHECK(parse_error_frame(frame) == "filter parameter mismatch");
}
