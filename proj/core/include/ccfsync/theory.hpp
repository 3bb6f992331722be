#ifndef CCFSYNC_THEORY_HPP
#define CCFSYNC_THEORY_HPP

#include <cstdint>

namespace ccfsync::theory {

// Analytical false-positive model for the counting cuckoo filter. All pure
// functions; the product forms are evaluated in log space so N up to 1e7
// does not underflow.

// epsilon ~ 1 - prod_{j=2..N} (1 - (j-1) / (b * 2^(f-1))).
// Throws std::domain_error when a product term would go non-positive
// (N - 1 >= b * 2^(f-1)).
double ccf_fpr_product(uint64_t buckets, uint32_t fingerprint_bits,
                       uint64_t distinct_elements);

// Full-occupancy bound epsilon ~ w / 2^(f-1), clamped to <= 1.
double ccf_fpr_bound(uint32_t slots_per_bucket, uint32_t fingerprint_bits);

// Minimal integer f with ccf_fpr_bound(w, f) <= epsilon:
// f ~ ceil(log2 w + log2(1/epsilon) + 1).
uint32_t fingerprint_bits(uint32_t slots_per_bucket, double epsilon);

// Expected collided elements at full occupancy: b * w * w / 2^(f-1).
// Equals 2 w^2 when b == 2^f.
double expected_collisions(uint64_t buckets, uint32_t slots_per_bucket,
                           uint32_t fingerprint_bits);

// Variant with a per-slot bucket-order bit: the tuple space grows to
// b * 2^f, so epsilon ~ 1 - prod (1 - (j-1) / (b * 2^f)). Analyzed only;
// the bit is better spent on the fingerprint.
double ccf_fpr_diffbit(uint64_t buckets, uint32_t fingerprint_bits,
                       uint64_t distinct_elements);

}  // namespace ccfsync::theory

#endif  // CCFSYNC_THEORY_HPP
