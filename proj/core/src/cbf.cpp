#include "ccfsync/cbf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ccfsync/bytes.hpp"
#include "ccfsync/hash.hpp"

namespace ccfsync {

namespace {

constexpr char kMagic[4] = {'C', 'B', 'F', '1'};
constexpr uint8_t kVersion = 1;

}  // namespace

void CbfParams::validate() const {
    if (counters < 1) {
        throw std::invalid_argument("counters must be >= 1");
    }
    if (hashes < 1 || hashes > 32) {
        throw std::invalid_argument("hashes must be in 1..32");
    }
    if (counter_bits < 1 || counter_bits > 32) {
        throw std::invalid_argument("counter_bits must be in 1..32");
    }
}

Cbf::Cbf(CbfParams params) : params_(params) {
    params_.validate();
    counters_.resize(params_.counters, 0);
}

uint32_t Cbf::index(const Element& x, uint32_t i) const {
    uint64_t g1 = hash64(x.view(), params_.seed1);
    uint64_t g2 = hash64(x.view(), params_.seed2) | 1;
    // 128-bit so i * g2 cannot wrap; the k probes then really are an
    // arithmetic progression with stride g2 modulo m.
    unsigned __int128 v = static_cast<unsigned __int128>(i) * g2 + g1;
    return static_cast<uint32_t>(v % params_.counters);
}

void Cbf::insert(const Element& x, uint64_t count) {
    if (count < 1 || count > params_.max_counter()) {
        throw counter_range_error("insert count out of counter range");
    }
    // Two of the k indices may coincide, so the overflow check has to
    // accumulate per position before committing anything.
    std::vector<std::pair<uint32_t, uint64_t>> deltas;
    for (uint32_t i = 0; i < params_.hashes; ++i) {
        uint32_t pos = index(x, i);
        auto it = std::find_if(deltas.begin(), deltas.end(),
                               [pos](const auto& d) { return d.first == pos; });
        if (it == deltas.end()) {
            deltas.emplace_back(pos, count);
        } else {
            it->second += count;
        }
    }
    for (const auto& [pos, delta] : deltas) {
        if (counters_[pos] + delta > params_.max_counter()) {
            throw counter_overflow_error("counter would overflow at position " +
                                         std::to_string(pos));
        }
    }
    for (const auto& [pos, delta] : deltas) {
        ++counter_accesses_;
        counters_[pos] += delta;
    }
}

void Cbf::remove(const Element& x, uint64_t count) {
    if (count < 1) {
        throw counter_range_error("remove count must be >= 1");
    }
    std::vector<std::pair<uint32_t, uint64_t>> deltas;
    for (uint32_t i = 0; i < params_.hashes; ++i) {
        uint32_t pos = index(x, i);
        auto it = std::find_if(deltas.begin(), deltas.end(),
                               [pos](const auto& d) { return d.first == pos; });
        if (it == deltas.end()) {
            deltas.emplace_back(pos, count);
        } else {
            it->second += count;
        }
    }
    for (const auto& [pos, delta] : deltas) {
        if (counters_[pos] < delta) {
            throw counter_range_error("counter would underflow at position " +
                                      std::to_string(pos));
        }
    }
    for (const auto& [pos, delta] : deltas) {
        ++counter_accesses_;
        counters_[pos] -= delta;
    }
}

uint64_t Cbf::query(const Element& x) const {
    uint64_t min_count = ~0ull;
    for (uint32_t i = 0; i < params_.hashes; ++i) {
        ++counter_accesses_;
        min_count = std::min(min_count, counters_[index(x, i)]);
    }
    return min_count;
}

Cbf subtract(const Cbf& a, const Cbf& b) {
    if (a.params() != b.params()) {
        throw param_mismatch_error("subtract requires identical parameters");
    }
    Cbf out(a.params());
    for (uint32_t i = 0; i < a.params().counters; ++i) {
        uint64_t av = a.counter_at(i);
        uint64_t bv = b.counter_at(i);
        out.counters_[i] = av > bv ? av - bv : 0;
    }
    return out;
}

std::vector<uint8_t> Cbf::params_blob() const {
    ByteWriter w;
    w.u32(params_.counters);
    w.u8(static_cast<uint8_t>(params_.hashes));
    w.u8(static_cast<uint8_t>(params_.counter_bits));
    w.u64(params_.seed1);
    w.u64(params_.seed2);
    return w.take();
}

CbfParams Cbf::params_from_blob(std::span<const uint8_t> blob) {
    ByteReader r(blob);
    CbfParams p;
    p.counters = r.u32();
    p.hashes = r.u8();
    p.counter_bits = r.u8();
    p.seed1 = r.u64();
    p.seed2 = r.u64();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw parse_error(parse_error::kind::bad_params, e.what());
    }
    return p;
}

std::vector<uint8_t> Cbf::serialize() const {
    ByteWriter w;
    w.bytes(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(kMagic), sizeof kMagic));
    w.u8(kVersion);
    for (uint8_t b : params_blob()) {
        w.u8(b);
    }
    for (uint64_t c : counters_) {
        w.uint_be(c, params_.counter_bytes());
    }
    return w.take();
}

Cbf Cbf::deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    std::string magic = r.bytes(4);
    if (magic != std::string(kMagic, sizeof kMagic)) {
        throw parse_error(parse_error::kind::bad_magic, "bad magic");
    }
    uint8_t version = r.u8();
    if (version != kVersion) {
        throw parse_error(parse_error::kind::bad_version,
                          "unsupported version " + std::to_string(version));
    }
    CbfParams p;
    p.counters = r.u32();
    p.hashes = r.u8();
    p.counter_bits = r.u8();
    p.seed1 = r.u64();
    p.seed2 = r.u64();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw parse_error(parse_error::kind::bad_params, e.what());
    }
    Cbf out(p);
    if (r.remaining() != static_cast<size_t>(p.counters) * p.counter_bytes()) {
        throw parse_error(parse_error::kind::truncated,
                          "payload size does not match parameters");
    }
    for (uint64_t& c : out.counters_) {
        c = r.uint_be(p.counter_bytes());
        if (c > p.max_counter()) {
            throw parse_error(parse_error::kind::bad_slot,
                              "counter out of range");
        }
    }
    return out;
}

uint32_t optimal_k(uint64_t m, uint64_t n) {
    if (m < 1 || n < 1) {
        throw std::invalid_argument("optimal_k requires m, n >= 1");
    }
    double k = (static_cast<double>(m) / static_cast<double>(n)) *
               std::numbers::ln2;
    auto rounded = static_cast<uint32_t>(std::llround(k));
    return rounded < 1 ? 1 : rounded;
}

double cbf_theoretical_fpr(uint64_t m, uint64_t n, uint32_t k) {
    if (m < 1 || n < 1 || k < 1) {
        throw std::invalid_argument("cbf_theoretical_fpr requires m, n, k >= 1");
    }
    double exponent = -static_cast<double>(k) * static_cast<double>(n) /
                      static_cast<double>(m);
    return std::pow(1.0 - std::exp(exponent), static_cast<double>(k));
}

}  // namespace ccfsync
