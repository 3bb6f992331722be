#ifndef CCFSYNC_MULTISET_HPP
#define CCFSYNC_MULTISET_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "ccfsync/element.hpp"

namespace ccfsync {

// (element, count) pairs; count is a multiplicity for d_E lists and a
// replica delta for d_M lists.
using EntryList = std::vector<std::pair<Element, uint64_t>>;

// Element -> multiplicity map. No entry ever has multiplicity 0; removing
// the last replica deletes the entry. Single writer, concurrent readers.
class Multiset {
public:
    using Map = std::map<Element, uint64_t>;
    using const_iterator = Map::const_iterator;

    Multiset() = default;

    void add(const Element& x, uint64_t k = 1);

    // Removes k replicas; erases the entry when it reaches 0.
    // Throws std::out_of_range if fewer than k replicas are present.
    void remove(const Element& x, uint64_t k = 1);

    // Sets the multiplicity outright (k >= 1).
    void set(const Element& x, uint64_t k);

    uint64_t multiplicity(const Element& x) const;
    bool contains(const Element& x) const { return multiplicity(x) > 0; }

    uint64_t cardinality() const { return cardinality_; }
    size_t root_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const_iterator begin() const { return entries_.begin(); }
    const_iterator end() const { return entries_.end(); }

    friend bool operator==(const Multiset&, const Multiset&) = default;

private:
    Map entries_;
    uint64_t cardinality_ = 0;
};

// Per-element max multiplicity: the fixed point both hosts converge to.
Multiset union_max(const Multiset& a, const Multiset& b);

// Per-element min multiplicity.
Multiset intersect_min(const Multiset& a, const Multiset& b);

// alpha = C(A intersect B) / C(A union B), in [0, 1].
// Both empty is defined as 1 (nothing left to synchronize).
double accuracy(const Multiset& a, const Multiset& b);

struct ApplyStats {
    // d_M entries whose element was absent locally (an upstream false
    // positive); the entry is skipped.
    size_t dm_missing = 0;
    // d_E entries that were already present locally; merged with max
    // semantics instead of blindly added.
    size_t de_present = 0;
};

// Applies a received d_E payload and the locally derived d_M deltas.
Multiset apply_diff(const Multiset& ms, const EntryList& received_d_e,
                    const EntryList& local_d_m, ApplyStats* stats = nullptr);

// Text fixture: one "hex(element) <TAB> multiplicity" line per entry,
// sorted by element bytes.
void write_fixture(std::ostream& os, const Multiset& ms);
Multiset read_fixture(std::istream& is);

}  // namespace ccfsync

#endif  // CCFSYNC_MULTISET_HPP
