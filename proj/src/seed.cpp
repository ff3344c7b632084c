#include "qus/seed.hpp"

#include <unordered_set>

namespace qus {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stafford variant 13 of the MurmurHash3 finalizer, as used by SplitMix64.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// MurmurHash3 finalizer; feeds the gamma derivation.
std::uint64_t mix64v(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}

// Odd gamma with enough bit transitions, per the SplitMix64 design.
std::uint64_t mix_gamma(std::uint64_t z) {
    z = mix64v(z) | 1ULL;
    int n = __builtin_popcountll(z ^ (z >> 1));
    if (n < 24) z ^= 0xaaaaaaaaaaaaaaaaULL;
    return z | 1ULL;
}

thread_local DrawLedger* t_ledger = nullptr;

} // namespace

struct DrawLedger::Impl {
    std::unordered_set<std::uint64_t> seen;
    std::size_t draws = 0;
    std::size_t duplicates = 0;

    void record(const Seed& s) {
        ++draws;
        // state xor rotated gamma identifies the draw site for audit purposes
        std::uint64_t key = s.state ^ (s.gamma << 1) ^ (s.gamma >> 63);
        if (!seen.insert(key).second) ++duplicates;
    }
};

DrawLedger::DrawLedger() : impl_(new Impl()), prev_(t_ledger) { t_ledger = this; }

DrawLedger::~DrawLedger() {
    t_ledger = prev_;
    delete impl_;
}

std::size_t DrawLedger::draws() const { return impl_->draws; }
std::size_t DrawLedger::duplicates() const { return impl_->duplicates; }

Seed seed_root(std::uint64_t user_seed) {
    return {mix64(user_seed + kGolden), mix_gamma(user_seed + 2 * kGolden)};
}

Seed seed_child(const Seed& s, std::uint64_t i) {
    // Offsets 2,3,... leave offset 1 for the node's own draw.
    std::uint64_t z = s.state + (i + 2) * s.gamma;
    return {mix64(z), mix_gamma(z + kGolden)};
}

double uniform(const Seed& s) {
    if (t_ledger) t_ledger->impl_->record(s);
    return static_cast<double>(mix64(s.state + s.gamma) >> 11) * 0x1.0p-53;
}

double stream_draw(const Seed& s, std::uint64_t k) { return uniform(seed_child(s, k)); }

} // namespace qus
