#pragma once

#include <cstdint>
#include <random>

namespace ssou {

// SplitMix64 finalizer. Used only to turn (seed, index) pairs into
// well-separated engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for substream `index` of `master`. Fixed function: replication r of an
// experiment always sees the same draws whatever the thread schedule.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// A random stream: mt19937_64 plus an explicit uniform conversion so draws
// do not depend on the standard library's distribution implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream substream(std::uint64_t master, std::uint64_t index) {
        return RngStream(derive_seed(master, index));
    }

    // Uniform on the open interval (0, 1), 53 random bits.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard exponential.
    double exponential();

private:
    std::mt19937_64 engine_;
};

}  // namespace ssou
