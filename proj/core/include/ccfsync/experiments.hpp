#ifndef CCFSYNC_EXPERIMENTS_HPP
#define CCFSYNC_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccfsync/diff.hpp"
#include "ccfsync/multiset.hpp"
#include "ccfsync/sync.hpp"

namespace ccfsync {

// Workload generation and the experiment runners behind the CLI. Every
// run is reproducible bit-for-bit from (config, seed); grid points derive
// their own RNG stream by hashing the base seed with the grid index.

struct PairSpec {
    uint64_t n_common_equal = 0;     // same multiplicity on both sides
    uint64_t n_common_multdiff = 0;  // present on both, multiplicities differ
    uint64_t n_unique_a = 0;
    uint64_t n_unique_b = 0;
    uint32_t max_multiplicity = 255;
    // 0 draws multiplicities uniformly from [1, max_multiplicity];
    // otherwise every element gets exactly this many replicas.
    uint32_t fixed_multiplicity = 0;

    uint64_t total_distinct() const {
        return n_common_equal + n_common_multdiff + n_unique_a + n_unique_b;
    }
};

struct MultisetPair {
    Multiset a;
    Multiset b;
    DiffResult truth_at_a;  // exact classification seen from host A
    DiffResult truth_at_b;
    std::vector<Element> universe;  // every distinct element of A or B
};

// Elements are distinct random 32-bit integers. Throws
// std::invalid_argument when the spec cannot fit the element space.
MultisetPair gen_multiset_pair(const PairSpec& spec, uint64_t seed);

// Fresh elements guaranteed disjoint from any gen_multiset_pair output
// (8-byte encoding vs 4-byte workload elements).
std::vector<Element> gen_absent_probes(size_t count, uint64_t seed);

// --- occupancy (slot utilization as the element count scales) ---

struct OccupancyRow {
    uint64_t n;  // distinct elements inserted
    uint32_t buckets;
    uint32_t fingerprint_bits;
    double occupancy;        // mean over repetitions
    double insert_failures;  // mean FULL rejections
    double ideal;            // n / (b * w)
};

struct OccupancyConfig {
    uint32_t k_min = 1;  // n = 500 * 2^k, buckets = 2^(k+7), f = k+7
    uint32_t k_max = 8;
    uint32_t repetitions = 3;
    uint64_t seed = 1;
};

std::vector<OccupancyRow> run_occupancy(const OccupancyConfig& cfg);

// --- false positives and collided elements ---

struct FprRow {
    std::string sweep;  // "b" or "f"
    uint32_t buckets;
    uint32_t fingerprint_bits;
    uint64_t n;
    double occupancy;
    double collided;         // measured colliding elements (mean)
    double collided_theory;  // 2 n^2 / (b 2^f)
    double fpr;              // measured absent-element false positive rate
    double fpr_theory;       // w / 2^(f-1)
};

struct FprConfig {
    uint32_t b_sweep_min_log2 = 8;
    uint32_t b_sweep_max_log2 = 14;
    uint32_t b_sweep_f = 10;
    uint32_t f_sweep_min = 7;
    uint32_t f_sweep_max = 14;
    uint32_t f_sweep_b_log2 = 10;
    size_t probes = 100000;
    uint32_t repetitions = 3;
    uint64_t seed = 1;
};

std::vector<FprRow> run_fpr(const FprConfig& cfg);

// --- synchronization accuracy ---

struct AccuracyRow {
    std::string method;
    uint32_t fingerprint_bits;  // 0 for the cbf method
    uint64_t filter_bits;       // total size of one filter
    double bpe;                 // filter_bits / distinct elements per side
    double alpha_mean;
    double alpha_min;
    double bytes_de_mean;  // d_E payload bytes, both ways
    double misclassified_mean;
};

struct AccuracyConfig {
    PairSpec spec{.n_common_equal = 31000,
                  .n_common_multdiff = 1000,
                  .n_unique_a = 32000,
                  .n_unique_b = 32000,
                  .fixed_multiplicity = 10};
    std::vector<uint32_t> f_values = {7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17};
    uint32_t ccf_counter_bits = 16;
    // CBF grid: counters per distinct element; counter width.
    std::vector<double> cbf_counters_per_element = {2,  4,  6,  8,  10, 12,
                                                    14, 16, 18, 20, 22, 24};
    uint32_t cbf_counter_bits = 16;
    uint32_t repetitions = 3;
    uint64_t seed = 1;
};

// method: "ccf-query", "ccf-decode" or "cbf".
std::vector<AccuracyRow> run_accuracy(const AccuracyConfig& cfg,
                                      const std::string& method);

// --- operation timing (relative trends only) ---

struct TimingRow {
    std::string structure;  // "ccf" or "cbf"
    std::string op;         // insert / query / erase / diff-...
    uint64_t n;
    double ns_per_op;  // median over repetitions, warm-up discarded
};

struct TimingConfig {
    std::vector<uint64_t> n_values = {1000, 4000, 16000, 64000};
    uint32_t repetitions = 5;
    uint64_t seed = 1;
};

std::vector<TimingRow> run_timing(const TimingConfig& cfg);

// CSV emission: one header row, snake_case columns, floats with six
// significant digits.
void write_csv(std::ostream& os, const std::vector<OccupancyRow>& rows);
void write_csv(std::ostream& os, const std::vector<FprRow>& rows);
void write_csv(std::ostream& os, const std::vector<AccuracyRow>& rows);
void write_csv(std::ostream& os, const std::vector<TimingRow>& rows);

}  // namespace ccfsync

#endif  // CCFSYNC_EXPERIMENTS_HPP
