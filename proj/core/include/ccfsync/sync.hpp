#ifndef CCFSYNC_SYNC_HPP
#define CCFSYNC_SYNC_HPP

#include <cstdint>

#include "ccfsync/cbf.hpp"
#include "ccfsync/ccf.hpp"
#include "ccfsync/diff.hpp"
#include "ccfsync/multiset.hpp"
#include "ccfsync/transport.hpp"
#include "ccfsync/wire.hpp"

namespace ccfsync {

// Both hosts must run identical filter parameters and seed; the HELLO
// exchange carries them and the session aborts on mismatch.
struct SyncConfig {
    SyncMethod method = SyncMethod::kCcfQuery;
    CcfParams ccf;  // used by the ccf-query / ccf-decode methods
    CbfParams cbf;  // used by the cbf method
};

// The initiator sends first in every exchange; the responder receives
// first. This keeps large filter transfers half-duplex and deadlock-free.
enum class SyncRole : uint8_t { kInitiator, kResponder };

struct EndpointOutcome {
    Multiset final;
    DiffResult diff;          // local classification against the peer
    EntryList received_d_e;   // payload the peer transmitted
    uint64_t bytes_filter_sent = 0;
    uint64_t bytes_filter_received = 0;
    uint64_t bytes_diff_sent = 0;
    uint64_t bytes_diff_received = 0;
    size_t insert_failures = 0;  // local filter build FULL rejections
    ApplyStats apply_stats;
    // Local completeness estimate carried in DONE: 1 minus the fraction of
    // entries that signalled an upstream false positive when applied.
    double alpha_local = 1.0;
    double alpha_peer = 1.0;
};

// Runs one two-round session end to end: HELLO, FILTER, DIFF, DONE.
// Throws sync_error on protocol violation or parameter mismatch (after
// sending an ERROR frame where possible) and transport_error on I/O loss.
EndpointOutcome run_sync_endpoint(const Multiset& local, const SyncConfig& cfg,
                                  SyncRole role, Transport& transport);

struct SyncReport {
    double alpha = 0.0;  // accuracy(final_a, final_b)
    uint64_t bytes_filter_a_to_b = 0;
    uint64_t bytes_filter_b_to_a = 0;
    uint64_t bytes_de_a_to_b = 0;
    uint64_t bytes_de_b_to_a = 0;
    // Entries of each host's DiffResult that disagree with the exact
    // (brute-force) classification, plus exact entries it missed.
    size_t misclassified_a = 0;
    size_t misclassified_b = 0;
    size_t insert_failures_a = 0;
    size_t insert_failures_b = 0;
    size_t inconsistencies = 0;  // apply_diff dm_missing + de_present
};

struct SyncResult {
    Multiset final_a;
    Multiset final_b;
    SyncReport report;
};

// Full in-process synchronization of two hosts over a channel pair; the
// report's alpha and misclassification counts use ground truth from the
// inputs, which a real endpoint never sees.
SyncResult synchronize(const Multiset& a, const Multiset& b,
                       const SyncConfig& cfg);

// Entries in `got` not present (element and count) in `want`, plus entries
// of `want` missing from `got`.
size_t count_mismatches(const DiffResult& got, const DiffResult& want);

}  // namespace ccfsync

#endif  // CCFSYNC_SYNC_HPP
