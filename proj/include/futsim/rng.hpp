#pragma once

#include <cstdint>

namespace futsim {

// splitmix64: tiny, fast, and trivially reproducible across platforms.
// All randomized behavior in the project flows through this generator so
// that a seed printed in a trace header is enough to replay a run.
class splitmix64 {
public:
    explicit splitmix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased enough for our purposes (bound is tiny vs 2^64).
    uint64_t next_below(uint64_t bound) { return bound ? next() % bound : 0; }

    // Derive an independent stream, e.g. one sub-seed per generated thread.
    uint64_t fork_seed() { return next(); }

private:
    uint64_t state_;
};

} // namespace futsim
