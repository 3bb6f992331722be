#ifndef CCFSYNC_CBF_HPP
#define CCFSYNC_CBF_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ccfsync/element.hpp"
#include "ccfsync/errors.hpp"

namespace ccfsync {

struct CbfParams {
    uint32_t counters = 0;      // m
    uint32_t hashes = 0;        // k, 1..32
    uint32_t counter_bits = 8;  // c
    uint64_t seed1 = 0;         // g1
    uint64_t seed2 = 0;         // g2

    void validate() const;

    uint64_t max_counter() const {
        return counter_bits == 64 ? ~0ull : (1ull << counter_bits) - 1;
    }
    size_t counter_bytes() const { return (counter_bits + 7) / 8; }

    friend bool operator==(const CbfParams&, const CbfParams&) = default;
};

// Counting Bloom filter baseline with double-hashing index generation and
// count-min multiplicity queries. Same access contract as Ccf: exclusive
// writer, concurrent readers otherwise.
class Cbf {
public:
    explicit Cbf(CbfParams params);

    const CbfParams& params() const { return params_; }

    // h_i(x) = (g1(x) + i * g2(x)) mod m; g2 is forced odd so the stride
    // never degenerates when m is even.
    uint32_t index(const Element& x, uint32_t i) const;

    // Adds `count` to all k counters. Throws counter_overflow_error if any
    // target counter would exceed 2^c - 1; the filter is left unchanged.
    void insert(const Element& x, uint64_t count);

    // Subtracts `count` from all k counters. Throws counter_range_error if
    // any would go below 0; the filter is left unchanged.
    void remove(const Element& x, uint64_t count);

    // Min over the k counters; never underestimates the true multiplicity.
    uint64_t query(const Element& x) const;

    uint64_t counter_at(uint32_t position) const {
        return counters_[position];
    }

    std::vector<uint8_t> serialize() const;
    static Cbf deserialize(std::span<const uint8_t> bytes);

    std::vector<uint8_t> params_blob() const;
    static CbfParams params_from_blob(std::span<const uint8_t> blob);

    // Instrumentation: counter reads/writes since the last reset.
    uint64_t counter_accesses() const { return counter_accesses_; }
    void reset_counter_accesses() { counter_accesses_ = 0; }

private:
    friend Cbf subtract(const Cbf& a, const Cbf& b);

    CbfParams params_;
    std::vector<uint64_t> counters_;
    mutable uint64_t counter_accesses_ = 0;
};

// Per-position difference floored at 0. Parameters and seeds must match.
Cbf subtract(const Cbf& a, const Cbf& b);

// k_op = (m/n) ln 2, rounded to the nearest integer >= 1.
uint32_t optimal_k(uint64_t m, uint64_t n);

// epsilon ~ (1 - e^(-kn/m))^k.
double cbf_theoretical_fpr(uint64_t m, uint64_t n, uint32_t k);

}  // namespace ccfsync

#endif  // CCFSYNC_CBF_HPP
