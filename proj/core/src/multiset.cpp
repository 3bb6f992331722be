#include "ccfsync/multiset.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ccfsync {

void Multiset::add(const Element& x, uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("add: count must be >= 1");
    }
    entries_[x] += k;
    cardinality_ += k;
}

void Multiset::remove(const Element& x, uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("remove: count must be >= 1");
    }
    auto it = entries_.find(x);
    if (it == entries_.end() || it->second < k) {
        throw std::out_of_range("remove: not enough replicas");
    }
    it->second -= k;
    cardinality_ -= k;
    if (it->second == 0) {
        entries_.erase(it);
    }
}

void Multiset::set(const Element& x, uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("set: multiplicity must be >= 1");
    }
    uint64_t& slot = entries_[x];
    cardinality_ += k - slot;
    slot = k;
}

uint64_t Multiset::multiplicity(const Element& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? 0 : it->second;
}

Multiset union_max(const Multiset& a, const Multiset& b) {
    Multiset out = a;
    for (const auto& [x, mb] : b) {
        if (mb > out.multiplicity(x)) {
            out.set(x, mb);
        }
    }
    return out;
}

Multiset intersect_min(const Multiset& a, const Multiset& b) {
    Multiset out;
    for (const auto& [x, ma] : a) {
        uint64_t mb = b.multiplicity(x);
        if (mb > 0) {
            out.add(x, std::min(ma, mb));
        }
    }
    return out;
}

double accuracy(const Multiset& a, const Multiset& b) {
    uint64_t min_sum = 0;
    uint64_t max_sum = 0;
    for (const auto& [x, ma] : a) {
        uint64_t mb = b.multiplicity(x);
        min_sum += std::min(ma, mb);
        max_sum += std::max(ma, mb);
    }
    for (const auto& [x, mb] : b) {
        if (!a.contains(x)) {
            max_sum += mb;
        }
    }
    if (max_sum == 0) {
        return 1.0;  // both empty: already synchronized
    }
    return static_cast<double>(min_sum) / static_cast<double>(max_sum);
}

Multiset apply_diff(const Multiset& ms, const EntryList& received_d_e,
                    const EntryList& local_d_m, ApplyStats* stats) {
    Multiset out = ms;
    ApplyStats local_stats;
    for (const auto& [x, count] : received_d_e) {
        uint64_t existing = out.multiplicity(x);
        if (existing == 0) {
            out.add(x, count);
        } else {
            // The sender believed x was absent here; merge toward the
            // union fixed point rather than inflating.
            local_stats.de_present++;
            if (count > existing) {
                out.set(x, count);
            }
        }
    }
    for (const auto& [x, delta] : local_d_m) {
        if (!out.contains(x)) {
            local_stats.dm_missing++;
            continue;
        }
        out.add(x, delta);
    }
    if (stats != nullptr) {
        *stats = local_stats;
    }
    return out;
}

namespace {

const char kHexDigits[] = "0123456789abcdef";

std::string to_hex(const std::string& bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(kHexDigits[c >> 4]);
        out.push_back(kHexDigits[c & 0x0f]);
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("fixture: odd hex length");
    }
    std::string out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw std::invalid_argument("fixture: bad hex digit");
        }
        out.push_back(static_cast<char>((hi << 4) | lo));
    }
    return out;
}

}  // namespace

void write_fixture(std::ostream& os, const Multiset& ms) {
    // std::map iterates in byte order already.
    for (const auto& [x, m] : ms) {
        os << to_hex(x.bytes()) << '\t' << m << '\n';
    }
}

Multiset read_fixture(std::istream& is) {
    Multiset ms;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::invalid_argument("fixture: missing tab separator");
        }
        std::string bytes = from_hex(line.substr(0, tab));
        uint64_t mult = std::stoull(line.substr(tab + 1));
        if (mult == 0) {
            throw std::invalid_argument("fixture: multiplicity must be >= 1");
        }
        ms.add(Element(std::move(bytes)), mult);
    }
    return ms;
}

}  // namespace ccfsync
