#include "ccfsync/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace ccfsync::theory {

namespace {

// 1 - prod_{j=2..N} (1 - (j-1)/tuple_space), via sum of log1p.
double one_minus_collision_free(double tuple_space, uint64_t n) {
    if (n < 1) {
        throw std::domain_error("distinct_elements must be >= 1");
    }
    if (static_cast<double>(n - 1) >= tuple_space) {
        throw std::domain_error(
            "too many elements for the tuple space: product term <= 0");
    }
    // Small products multiply directly so exactly representable factors
    // give exactly representable results; long products go through
    // log-space to avoid underflow.
    if (n <= 4096) {
        double prod = 1.0;
        for (uint64_t j = 2; j <= n; ++j) {
            prod *= 1.0 - static_cast<double>(j - 1) / tuple_space;
        }
        return 1.0 - prod;
    }
    double log_prod = 0.0;
    for (uint64_t j = 2; j <= n; ++j) {
        log_prod += std::log1p(-static_cast<double>(j - 1) / tuple_space);
    }
    return -std::expm1(log_prod);
}

}  // namespace

double ccf_fpr_product(uint64_t buckets, uint32_t fingerprint_bits,
                       uint64_t distinct_elements) {
    double tuple_space =
        static_cast<double>(buckets) * std::ldexp(1.0, fingerprint_bits - 1);
    return one_minus_collision_free(tuple_space, distinct_elements);
}

double ccf_fpr_diffbit(uint64_t buckets, uint32_t fingerprint_bits,
                       uint64_t distinct_elements) {
    double tuple_space =
        static_cast<double>(buckets) * std::ldexp(1.0, fingerprint_bits);
    return one_minus_collision_free(tuple_space, distinct_elements);
}

double ccf_fpr_bound(uint32_t slots_per_bucket, uint32_t fingerprint_bits) {
    if (fingerprint_bits < 1) {
        throw std::domain_error("fingerprint_bits must be >= 1");
    }
    double bound = static_cast<double>(slots_per_bucket) *
                   std::ldexp(1.0, 1 - static_cast<int>(fingerprint_bits));
    return bound > 1.0 ? 1.0 : bound;
}

uint32_t fingerprint_bits(uint32_t slots_per_bucket, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::domain_error("epsilon must be in (0, 1)");
    }
    double f = std::log2(static_cast<double>(slots_per_bucket)) +
               std::log2(1.0 / epsilon) + 1.0;
    auto bits = static_cast<uint32_t>(std::ceil(f - 1e-9));
    if (bits < 1) {
        bits = 1;
    }
    // The ceiling already guarantees the bound; step up in the face of
    // floating point edge cases.
    while (ccf_fpr_bound(slots_per_bucket, bits) > epsilon) {
        ++bits;
    }
    return bits;
}

double expected_collisions(uint64_t buckets, uint32_t slots_per_bucket,
                           uint32_t fingerprint_bits) {
    double w = static_cast<double>(slots_per_bucket);
    return static_cast<double>(buckets) * w * w *
           std::ldexp(1.0, 1 - static_cast<int>(fingerprint_bits));
}

}  // namespace ccfsync::theory
