#include "ccfsync/ccf.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "ccfsync/bytes.hpp"
#include "ccfsync/hash.hpp"

namespace ccfsync {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'F', '1'};
constexpr uint8_t kVersion = 1;

// Independent streams off the filter seed: bucket index, fingerprint,
// and the fingerprint re-hash used for the alternate bucket.
enum : uint64_t { kBucketStream = 0, kFpStream = 1, kAltStream = 2, kEvictStream = 3 };

}  // namespace

void CcfParams::validate() const {
    if (buckets < 2 || !std::has_single_bit(buckets)) {
        throw std::invalid_argument("buckets must be a power of two >= 2");
    }
    if (slots_per_bucket < 1) {
        throw std::invalid_argument("slots_per_bucket must be >= 1");
    }
    if (fingerprint_bits < 1 || fingerprint_bits > 32) {
        throw std::invalid_argument("fingerprint_bits must be in 1..32");
    }
    if (counter_bits < 1 || counter_bits > 32) {
        throw std::invalid_argument("counter_bits must be in 1..32");
    }
}

uint32_t CcfParams::buckets_for(uint64_t min_elements,
                                uint32_t slots_per_bucket) {
    uint64_t want = (min_elements + slots_per_bucket - 1) / slots_per_bucket;
    uint64_t b = std::bit_ceil(want < 2 ? 2 : want);
    if (b > 0x80000000ull) {
        throw std::invalid_argument("requested capacity too large");
    }
    return static_cast<uint32_t>(b);
}

Ccf::Ccf(CcfParams params)
    : params_(params),
      evict_rng_(derive_seed(params.seed, kEvictStream)) {
    params_.validate();
    // Normalize so params() round-trips through serialize/deserialize.
    params_.max_kicks = params_.effective_max_kicks();
    slots_.resize(params_.slot_count());
}

uint32_t Ccf::fingerprint_of(const Element& x) const {
    uint64_t h = hash64(x.view(), derive_seed(params_.seed, kFpStream));
    uint32_t fp = static_cast<uint32_t>(h) & params_.max_fingerprint();
    return fp == 0 ? 1 : fp;  // 0 is the empty sentinel
}

uint32_t Ccf::alt_bucket(uint32_t index, uint32_t fingerprint) const {
    // Re-hash the fingerprint value so alternates distribute well even for
    // short fingerprints.
    uint8_t fp_bytes[4] = {
        static_cast<uint8_t>(fingerprint >> 24),
        static_cast<uint8_t>(fingerprint >> 16),
        static_cast<uint8_t>(fingerprint >> 8),
        static_cast<uint8_t>(fingerprint),
    };
    uint64_t h = hash64(fp_bytes, sizeof fp_bytes,
                        derive_seed(params_.seed, kAltStream));
    return index ^ (static_cast<uint32_t>(h) & (params_.buckets - 1));
}

Ccf::Candidates Ccf::candidate_buckets(const Element& x) const {
    uint32_t fp = fingerprint_of(x);
    uint32_t h1 =
        static_cast<uint32_t>(hash64(x.view(),
                                     derive_seed(params_.seed, kBucketStream))) &
        (params_.buckets - 1);
    return {h1, alt_bucket(h1, fp), fp};
}

int Ccf::find_in_bucket(uint32_t bucket, uint32_t fp) const {
    ++bucket_accesses_;
    for (uint32_t j = 0; j < params_.slots_per_bucket; ++j) {
        if (slot_at(bucket, j).fingerprint == fp) {
            return static_cast<int>(j);
        }
    }
    return -1;
}

int Ccf::find_empty(uint32_t bucket) const {
    ++bucket_accesses_;
    for (uint32_t j = 0; j < params_.slots_per_bucket; ++j) {
        if (slot_at(bucket, j).empty()) {
            return static_cast<int>(j);
        }
    }
    return -1;
}

bool Ccf::insert(const Element& x, uint64_t count) {
    if (count < 1 || count > params_.max_counter()) {
        throw counter_range_error("insert count out of counter range");
    }
    const auto [h1, h2, fp] = candidate_buckets(x);
    const uint32_t w = params_.slots_per_bucket;

    // Same fingerprint already resident in a candidate bucket: combine the
    // counts instead of storing an ambiguous duplicate.
    for (uint32_t bucket : {h1, h2}) {
        int j = find_in_bucket(bucket, fp);
        if (j >= 0) {
            Slot& s = slot_ref(bucket, static_cast<uint32_t>(j));
            if (s.counter + count > params_.max_counter()) {
                throw counter_overflow_error("slot counter would overflow");
            }
            s.counter += count;
            return true;
        }
        if (h1 == h2) break;  // single-bucket element
    }

    for (uint32_t bucket : {h1, h2}) {
        int j = find_empty(bucket);
        if (j >= 0) {
            slot_ref(bucket, static_cast<uint32_t>(j)) = {fp, count};
            ++stored_count_;
            return true;
        }
        if (h1 == h2) break;
    }

    // Both candidate buckets full: kick-and-reallocate. Every displacement
    // is journaled so a FULL outcome can be rolled back losslessly.
    struct Displaced {
        uint32_t bucket;
        uint32_t slot;
        Slot previous;
    };
    std::vector<Displaced> journal;

    uint32_t victim_index =
        static_cast<uint32_t>(evict_rng_() % (h1 == h2 ? w : 2 * w));
    uint32_t cur_bucket = victim_index < w ? h1 : h2;
    uint32_t cur_slot = victim_index % w;

    Slot pending = slot_at(cur_bucket, cur_slot);
    journal.push_back({cur_bucket, cur_slot, pending});
    slot_ref(cur_bucket, cur_slot) = {fp, count};

    for (uint32_t kicks = 0; kicks < params_.effective_max_kicks(); ++kicks) {
        uint32_t alt = alt_bucket(cur_bucket, pending.fingerprint);
        int j = find_empty(alt);
        if (j >= 0) {
            slot_ref(alt, static_cast<uint32_t>(j)) = pending;
            ++stored_count_;
            return true;
        }
        uint32_t k = static_cast<uint32_t>(evict_rng_() % w);
        Slot next = slot_at(alt, k);
        journal.push_back({alt, k, next});
        slot_ref(alt, k) = pending;
        pending = next;
        cur_bucket = alt;
    }

    // FULL: undo the chain, restoring the pending victim and dropping x.
    for (auto it = journal.rbegin(); it != journal.rend(); ++it) {
        slot_ref(it->bucket, it->slot) = it->previous;
    }
    return false;
}

bool Ccf::erase(const Element& x) {
    const auto [h1, h2, fp] = candidate_buckets(x);
    for (uint32_t bucket : {h1, h2}) {
        int j = find_in_bucket(bucket, fp);
        if (j >= 0) {
            slot_ref(bucket, static_cast<uint32_t>(j)) = {};
            --stored_count_;
            return true;
        }
        if (h1 == h2) break;
    }
    return false;
}

uint64_t Ccf::query(const Element& x) const {
    const auto [h1, h2, fp] = candidate_buckets(x);
    int j = find_in_bucket(h1, fp);
    if (j >= 0) {
        return slot_at(h1, static_cast<uint32_t>(j)).counter;
    }
    if (h2 != h1) {
        j = find_in_bucket(h2, fp);
        if (j >= 0) {
            return slot_at(h2, static_cast<uint32_t>(j)).counter;
        }
    }
    return 0;
}

std::vector<uint8_t> Ccf::params_blob() const {
    ByteWriter w;
    w.u32(params_.buckets);
    w.u8(static_cast<uint8_t>(params_.slots_per_bucket));
    w.u8(static_cast<uint8_t>(params_.fingerprint_bits));
    w.u8(static_cast<uint8_t>(params_.counter_bits));
    w.u32(params_.effective_max_kicks());
    w.u64(params_.seed);
    return w.take();
}

CcfParams Ccf::params_from_blob(std::span<const uint8_t> blob) {
    ByteReader r(blob);
    CcfParams p;
    p.buckets = r.u32();
    p.slots_per_bucket = r.u8();
    p.fingerprint_bits = r.u8();
    p.counter_bits = r.u8();
    p.max_kicks = r.u32();
    p.seed = r.u64();
    if (p.buckets < 2 || !std::has_single_bit(p.buckets)) {
        throw parse_error(parse_error::kind::bad_params,
                          "bucket count is not a power of two");
    }
    if (p.fingerprint_bits < 1 || p.fingerprint_bits > 32 ||
        p.counter_bits < 1 || p.counter_bits > 32 ||
        p.slots_per_bucket < 1 || p.max_kicks < 1) {
        throw parse_error(parse_error::kind::bad_params,
                          "filter parameter out of range");
    }
    return p;
}

std::vector<uint8_t> Ccf::serialize() const {
    ByteWriter w;
    w.bytes(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(kMagic), sizeof kMagic));
    w.u8(kVersion);
    for (uint8_t b : params_blob()) {
        w.u8(b);
    }
    const size_t fp_bytes = (params_.fingerprint_bits + 7) / 8;
    const size_t ctr_bytes = (params_.counter_bits + 7) / 8;
    for (const Slot& s : slots_) {
        w.uint_be(s.fingerprint, fp_bytes);
        w.uint_be(s.counter, ctr_bytes);
    }
    return w.take();
}

Ccf Ccf::deserialize(std::span<const uint8_t> bytes) {
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
    CcfParams p;
    p.buckets = r.u32();
    p.slots_per_bucket = r.u8();
    p.fingerprint_bits = r.u8();
    p.counter_bits = r.u8();
    p.max_kicks = r.u32();
    p.seed = r.u64();
    if (p.buckets < 2 || !std::has_single_bit(p.buckets)) {
        throw parse_error(parse_error::kind::bad_params,
                          "bucket count is not a power of two");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw parse_error(parse_error::kind::bad_params, e.what());
    }

    Ccf out(p);
    const size_t fp_bytes = (p.fingerprint_bits + 7) / 8;
    const size_t ctr_bytes = (p.counter_bits + 7) / 8;
    if (r.remaining() != p.slot_count() * (fp_bytes + ctr_bytes)) {
        throw parse_error(parse_error::kind::truncated,
                          "payload size does not match parameters");
    }
    for (Slot& s : out.slots_) {
        s.fingerprint = static_cast<uint32_t>(r.uint_be(fp_bytes));
        s.counter = r.uint_be(ctr_bytes);
        if (s.fingerprint > p.max_fingerprint() ||
            s.counter > p.max_counter()) {
            throw parse_error(parse_error::kind::bad_slot,
                              "slot field out of range");
        }
        if (s.empty() != (s.counter == 0)) {
            throw parse_error(parse_error::kind::bad_slot,
                              "slot empty-sentinel mismatch");
        }
        if (!s.empty()) {
            ++out.stored_count_;
        }
    }
    return out;
}

}  // namespace ccfsync
