#pragma once

#include <array>
#include <cstdint>

namespace alws {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11). The generator state is a 128-bit
// counter plus a 64-bit key derived from the user seed; the high counter
// words hold a stream id, so substreams derived from the same seed are
// independent by construction.
//
// Reproducibility contract: integer and uniform draws are bit-identical for
// a given (seed, stream) on every platform; gaussian draws additionally
// depend on the platform's libm but are deterministic for a given build.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double next_double();

    // Standard normal via Box-Muller (pairs generated, one cached).
    double next_gaussian();

    // Independent generator for the same seed; `id` selects the stream.
    Philox substream(std::uint64_t id) const;

    std::uint64_t seed() const { return seed_; }

private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

// SplitMix64 finalizer; used to decorrelate derived stream ids.
std::uint64_t splitmix64(std::uint64_t x);

// One raw Philox4x32-10 block (checkable against the published vectors).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

}  // namespace alws
