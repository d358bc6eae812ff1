#pragma once

#include <cstdint>
#include <random>

namespace delfi {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream key for the named substream (seed, machine, repetition).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t machine,
                                std::uint64_t repetition) {
    std::uint64_t z = splitmix64(seed);
    z = splitmix64(z ^ splitmix64(machine + 0x632be59bd9b4e019ULL));
    z = splitmix64(z ^ splitmix64(repetition + 0xd1b54a32d192ed03ULL));
    return z;
}

// One reproducible substream. Machines and repetitions get independent
// streams, so generation order never changes the draws.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t machine, std::uint64_t repetition)
        : engine_(stream_key(seed, machine, repetition)) {}

    double normal() { return normal_(engine_); }

    double exponential(double rate) {
        return std::exponential_distribution<double>(rate)(engine_);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace delfi
