#pragma once

#include <cstdint>
#include <utility>

namespace qus {

// The sample space, realized as a splittable counter-mode PRNG tree in the
// SplitMix64 style (Steele/Lea/Flood). A Seed is an immutable value; it
// yields exactly one uniform draw, and children are reached by index. The
// stream of any node is a pure function of the root state and the split
// path, so everything built on seeds replays bit-identically.
struct Seed {
    std::uint64_t state;
    std::uint64_t gamma;  // odd

    friend bool operator==(const Seed&, const Seed&) = default;
};

Seed seed_root(std::uint64_t user_seed);

// The i-th child. Distinct (path, index) combinations give distinct streams.
Seed seed_child(const Seed& s, std::uint64_t i);

inline std::pair<Seed, Seed> split(const Seed& s) {
    return {seed_child(s, 0), seed_child(s, 1)};
}

// The one uniform draw in [0,1) attached to this seed (53-bit resolution).
double uniform(const Seed& s);

// Draw k of the stream rooted at s: uniform(seed_child(s, k)).
double stream_draw(const Seed& s, std::uint64_t k);

// Opt-in audit that no uniform draw is consumed by two different logical
// random choices. While a ledger is installed on this thread, every
// uniform() call records its seed identity; a repeat bumps duplicates().
// Sampler plumbing is expected to keep this at zero for a single run.
class DrawLedger {
public:
    DrawLedger();
    ~DrawLedger();
    DrawLedger(const DrawLedger&) = delete;
    DrawLedger& operator=(const DrawLedger&) = delete;

    std::size_t draws() const;
    std::size_t duplicates() const;

private:
    friend double uniform(const Seed& s);
    struct Impl;
    Impl* impl_;
    DrawLedger* prev_;
};

} // namespace qus
