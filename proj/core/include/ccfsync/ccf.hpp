#ifndef CCFSYNC_CCF_HPP
#define CCFSYNC_CCF_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ccfsync/element.hpp"
#include "ccfsync/errors.hpp"

namespace ccfsync {

struct CcfParams {
    uint32_t buckets = 0;           // b, power of two >= 2
    uint32_t slots_per_bucket = 4;  // w
    uint32_t fingerprint_bits = 0;  // f, 1..32
    uint32_t counter_bits = 8;      // c, 1..32
    uint32_t max_kicks = 0;         // reallocation threshold; 0 = buckets
    uint64_t seed = 0;

    // Throws std::invalid_argument on any violated constraint.
    void validate() const;

    // Smallest power-of-two bucket count whose slots hold at least
    // min_elements distinct entries.
    static uint32_t buckets_for(uint64_t min_elements,
                                uint32_t slots_per_bucket = 4);

    uint32_t effective_max_kicks() const {
        return max_kicks == 0 ? buckets : max_kicks;
    }
    uint32_t max_fingerprint() const {
        return fingerprint_bits == 32
                   ? 0xffffffffu
                   : (1u << fingerprint_bits) - 1;
    }
    uint64_t max_counter() const {
        return counter_bits == 64 ? ~0ull : (1ull << counter_bits) - 1;
    }
    uint64_t slot_count() const {
        return static_cast<uint64_t>(buckets) * slots_per_bucket;
    }
    // Stored bits per slot, byte-aligned as serialized.
    size_t slot_bytes() const {
        return (fingerprint_bits + 7) / 8 + (counter_bits + 7) / 8;
    }

    friend bool operator==(const CcfParams&, const CcfParams&) = default;
};

// fingerprint == 0 is the empty sentinel; a non-empty slot has both
// fields in [1, 2^f - 1] x [1, 2^c - 1].
struct Slot {
    uint32_t fingerprint = 0;
    uint64_t counter = 0;

    bool empty() const { return fingerprint == 0; }
    friend bool operator==(const Slot&, const Slot&) = default;
};

// Counting cuckoo filter: b buckets of w (fingerprint, counter) slots with
// partial-key candidate buckets. Exclusive access for insert/erase;
// concurrent queries are safe when no writer is active.
class Ccf {
public:
    explicit Ccf(CcfParams params);

    const CcfParams& params() const { return params_; }

    // Never returns the empty sentinel 0; deterministic for a fixed seed.
    uint32_t fingerprint_of(const Element& x) const;

    struct Candidates {
        uint32_t h1;
        uint32_t h2;
        uint32_t fingerprint;
    };
    Candidates candidate_buckets(const Element& x) const;

    // XOR involution: alt_bucket(alt_bucket(i, fp), fp) == i.
    uint32_t alt_bucket(uint32_t index, uint32_t fingerprint) const;

    // Stores (fingerprint, count), kicking residents to their alternate
    // buckets as needed. Returns false when max_kicks is exhausted (FULL);
    // the kick chain is rolled back so no stored entry is lost.
    // If the fingerprint already sits in a candidate bucket the counts are
    // combined; exceeding 2^c - 1 throws counter_overflow_error.
    // count outside [1, 2^c - 1] throws counter_range_error.
    bool insert(const Element& x, uint64_t count);

    // Clears the matching slot entirely (all replicas at once).
    // Returns false when the fingerprint is in neither candidate bucket.
    bool erase(const Element& x);

    // Multiplicity of x, or 0 when absent. Scans bucket h1 slot 0..w-1,
    // then h2; at most 2w slots.
    uint64_t query(const Element& x) const;

    size_t stored_count() const { return stored_count_; }
    double occupancy() const {
        return static_cast<double>(stored_count_) /
               static_cast<double>(params_.slot_count());
    }

    const Slot& slot_at(uint32_t bucket, uint32_t slot) const {
        return slots_[static_cast<size_t>(bucket) * params_.slots_per_bucket +
                      slot];
    }

    std::vector<uint8_t> serialize() const;
    static Ccf deserialize(std::span<const uint8_t> bytes);

    // Header-equivalent parameter encoding, used by the sync HELLO frame.
    std::vector<uint8_t> params_blob() const;
    static CcfParams params_from_blob(std::span<const uint8_t> blob);

    // Instrumentation: bucket scans since the last reset.
    uint64_t bucket_accesses() const { return bucket_accesses_; }
    void reset_bucket_accesses() { bucket_accesses_ = 0; }

private:
    Slot& slot_ref(uint32_t bucket, uint32_t slot) {
        return slots_[static_cast<size_t>(bucket) * params_.slots_per_bucket +
                      slot];
    }
    // Index of the first slot in `bucket` matching fp, or -1.
    int find_in_bucket(uint32_t bucket, uint32_t fp) const;
    int find_empty(uint32_t bucket) const;

    CcfParams params_;
    std::vector<Slot> slots_;
    size_t stored_count_ = 0;
    std::mt19937_64 evict_rng_;
    mutable uint64_t bucket_accesses_ = 0;
};

}  // namespace ccfsync

#endif  // CCFSYNC_CCF_HPP
