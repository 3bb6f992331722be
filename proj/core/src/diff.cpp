#include "ccfsync/diff.hpp"

#include <map>
#include <set>
#include <tuple>

namespace ccfsync {

DiffResult diff_query(const Multiset& local, const Ccf& remote) {
    DiffResult out;
    for (const auto& [x, m_local] : local) {
        uint64_t m_remote = remote.query(x);
        if (m_remote == 0) {
            out.d_e.emplace_back(x, m_local);
        } else if (m_remote > m_local) {
            out.d_m.emplace_back(x, m_remote - m_local);
        }
        // m_remote <= m_local: nothing to do on this side.
    }
    return out;
}

DiffResult diff_cbf(const Multiset& local, const Cbf& remote) {
    DiffResult out;
    for (const auto& [x, m_local] : local) {
        uint64_t m_remote = remote.query(x);
        if (m_remote == 0) {
            out.d_e.emplace_back(x, m_local);
        } else if (m_remote > m_local) {
            out.d_m.emplace_back(x, m_remote - m_local);
        }
    }
    return out;
}

DiffResult diff_decode(const Multiset& local, const Ccf& local_filter,
                       const Ccf& remote_filter) {
    if (local_filter.params() != remote_filter.params()) {
        throw param_mismatch_error(
            "decode requires filters with identical parameters and seed");
    }
    const CcfParams& p = local_filter.params();
    const uint32_t w = p.slots_per_bucket;

    // Phase 1: eliminate common fingerprints on a working copy; the host's
    // own filter is never mutated.
    std::vector<Slot> working(p.slot_count());
    for (uint32_t i = 0; i < p.buckets; ++i) {
        for (uint32_t j = 0; j < w; ++j) {
            working[static_cast<size_t>(i) * w + j] = local_filter.slot_at(i, j);
        }
    }
    DecodeOverlay overlay(p.slot_count());

    auto find_remote = [&](uint32_t bucket, uint32_t fp) -> const Slot* {
        for (uint32_t j = 0; j < w; ++j) {
            const Slot& s = remote_filter.slot_at(bucket, j);
            if (s.fingerprint == fp) {
                return &s;
            }
        }
        return nullptr;
    };

    for (uint32_t i = 0; i < p.buckets; ++i) {
        for (uint32_t j = 0; j < w; ++j) {
            Slot& s = working[static_cast<size_t>(i) * w + j];
            if (s.empty()) {
                continue;
            }
            const Slot* remote = find_remote(i, s.fingerprint);
            if (remote == nullptr) {
                uint32_t alt = local_filter.alt_bucket(i, s.fingerprint);
                if (alt != i) {
                    remote = find_remote(alt, s.fingerprint);
                }
            }
            if (remote == nullptr) {
                overlay.flags[static_cast<size_t>(i) * w + j] = 0;  // d_E
            } else if (remote->counter > s.counter) {
                overlay.flags[static_cast<size_t>(i) * w + j] = 1;  // d_M
                s.counter = remote->counter - s.counter;  // replica delta
            } else {
                s = {};  // common element (or remote-smaller): eliminated
            }
        }
    }

    // Phase 2: walk the surviving slots and decode each back to an element.
    // Candidates are local root-set members whose fingerprint and bucket pair
    // cover the slot; the first unclaimed one wins and each slot yields at
    // most one element, so a falsely eliminated slot drops its element.
    std::map<std::pair<uint32_t, uint32_t>, std::vector<const Element*>>
        by_bucket_fp;
    for (const auto& [x, m_local] : local) {
        auto cand = local_filter.candidate_buckets(x);
        by_bucket_fp[{cand.h1, cand.fingerprint}].push_back(&x);
        if (cand.h2 != cand.h1) {
            by_bucket_fp[{cand.h2, cand.fingerprint}].push_back(&x);
        }
    }

    DiffResult out;
    std::set<const Element*> claimed;
    for (uint32_t i = 0; i < p.buckets; ++i) {
        for (uint32_t j = 0; j < w; ++j) {
            size_t idx = static_cast<size_t>(i) * w + j;
            const Slot& s = working[idx];
            if (s.empty()) {
                continue;
            }
            auto it = by_bucket_fp.find({i, s.fingerprint});
            if (it == by_bucket_fp.end()) {
                continue;  // no local element maps here
            }
            const Element* x = nullptr;
            for (const Element* cand : it->second) {
                if (!claimed.contains(cand)) {
                    x = cand;
                    break;
                }
            }
            if (x == nullptr) {
                continue;
            }
            claimed.insert(x);
            if (overlay.flags[idx] == 0) {
                out.d_e.emplace_back(*x, local.multiplicity(*x));
            } else {
                out.d_m.emplace_back(*x, s.counter);
            }
        }
    }
    return out;
}

DiffResult diff_exact(const Multiset& local, const Multiset& remote) {
    DiffResult out;
    for (const auto& [x, m_local] : local) {
        uint64_t m_remote = remote.multiplicity(x);
        if (m_remote == 0) {
            out.d_e.emplace_back(x, m_local);
        } else if (m_remote > m_local) {
            out.d_m.emplace_back(x, m_remote - m_local);
        }
    }
    return out;
}

size_t count_tuple_collisions(const Ccf& reference,
                              const std::vector<Element>& universe) {
    std::map<std::tuple<uint32_t, uint32_t, uint32_t>, uint32_t> counts;
    for (const Element& x : universe) {
        auto cand = reference.candidate_buckets(x);
        uint32_t lo = std::min(cand.h1, cand.h2);
        uint32_t hi = std::max(cand.h1, cand.h2);
        counts[{lo, hi, cand.fingerprint}]++;
    }
    size_t collided = 0;
    for (const auto& [tuple, n] : counts) {
        if (n >= 2) {
            collided += n;
        }
    }
    return collided;
}

}  // namespace ccfsync
