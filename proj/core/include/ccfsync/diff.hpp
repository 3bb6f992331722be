#ifndef CCFSYNC_DIFF_HPP
#define CCFSYNC_DIFF_HPP

#include <cstdint>
#include <vector>

#include "ccfsync/cbf.hpp"
#include "ccfsync/ccf.hpp"
#include "ccfsync/multiset.hpp"

namespace ccfsync {

// Classified differences seen from one host. d_e holds elements believed
// absent from the remote multiset (to transmit, with multiplicity); d_m
// holds elements whose remote multiplicity exceeds local (replica delta,
// satisfied locally). No element appears in both lists.
struct DiffResult {
    EntryList d_e;
    EntryList d_m;

    friend bool operator==(const DiffResult&, const DiffResult&) = default;
};

// Per-slot flag bits accompanying a working copy during decoding.
// Transient companion state; never serialized.
struct DecodeOverlay {
    explicit DecodeOverlay(size_t slot_count) : flags(slot_count, 0) {}
    std::vector<uint8_t> flags;
};

// Query-based identification: each root-set element of `local` is looked
// up in the remote filter. Exactly |A*| filter queries.
DiffResult diff_query(const Multiset& local, const Ccf& remote);

// Decoding-based identification: eliminates common fingerprints from a
// working copy of local_filter against remote_filter, then resolves the
// surviving slots back to root-set elements by fingerprint and candidate
// buckets. Filters must share parameters and seed.
DiffResult diff_decode(const Multiset& local, const Ccf& local_filter,
                       const Ccf& remote_filter);

// CBF baseline: same classification rule as diff_query but against
// count-min multiplicity estimates.
DiffResult diff_cbf(const Multiset& local, const Cbf& remote);

// Ground truth by direct enumeration of both multisets.
DiffResult diff_exact(const Multiset& local, const Multiset& remote);

// Number of elements whose (candidate bucket pair, fingerprint) tuple
// coincides with another element's under `reference`'s seed. Zero here
// guarantees the query and decode paths agree with the exact diff.
size_t count_tuple_collisions(const Ccf& reference,
                              const std::vector<Element>& universe);

}  // namespace ccfsync

#endif  // CCFSYNC_DIFF_HPP
