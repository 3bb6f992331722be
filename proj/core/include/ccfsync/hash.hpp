#ifndef CCFSYNC_HASH_HPP
#define CCFSYNC_HASH_HPP

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string_view>

namespace ccfsync {

// MurmurHash64A. Seeded, non-cryptographic, deterministic across platforms.
inline uint64_t hash64(const void* data, size_t len, uint64_t seed) {
    const uint64_t m = 0xc6a4a7935bd1e995ULL;
    const int r = 47;

    uint64_t h = seed ^ (len * m);

    const unsigned char* p = static_cast<const unsigned char*>(data);
    const unsigned char* end = p + (len / 8) * 8;

    while (p != end) {
        uint64_t k;
        std::memcpy(&k, p, 8);
        p += 8;

        k *= m;
        k ^= k >> r;
        k *= m;

        h ^= k;
        h *= m;
    }

    switch (len & 7) {
        case 7: h ^= static_cast<uint64_t>(p[6]) << 48; [[fallthrough]];
        case 6: h ^= static_cast<uint64_t>(p[5]) << 40; [[fallthrough]];
        case 5: h ^= static_cast<uint64_t>(p[4]) << 32; [[fallthrough]];
        case 4: h ^= static_cast<uint64_t>(p[3]) << 24; [[fallthrough]];
        case 3: h ^= static_cast<uint64_t>(p[2]) << 16; [[fallthrough]];
        case 2: h ^= static_cast<uint64_t>(p[1]) << 8;  [[fallthrough]];
        case 1: h ^= static_cast<uint64_t>(p[0]);
                h *= m;
    }

    h ^= h >> r;
    h *= m;
    h ^= h >> r;

    return h;
}

inline uint64_t hash64(std::string_view s, uint64_t seed) {
    return hash64(s.data(), s.size(), seed);
}

// Derives an independent stream from a base seed.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + stream * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace ccfsync

#endif  // CCFSYNC_HASH_HPP
