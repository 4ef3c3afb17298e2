#pragma once

#include <cstdint>
#include <vector>

namespace dynjt {

// SplitMix64. All randomness in the project flows through this generator so
// that generated fixtures and benchmark streams are bit-identical across
// platforms; <random> distributions are implementation-defined and avoided.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 bits of precision
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased uniform integer in [0, n), n > 0
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int next_int(int n) { return static_cast<int>(next_below(static_cast<std::uint64_t>(n))); }

    // independent stream derived from (current state, stream id); does not
    // advance this generator
    SplitMix64 split(std::uint64_t stream) const {
        SplitMix64 g(state_ ^ (0x632be59bd9b4e019ULL + stream * 0x9e3779b97f4a7c15ULL));
        g.next_u64();
        return g;
    }

private:
    std::uint64_t state_;
};

// uniformly chosen k-subset via partial Fisher-Yates; keeps the draw order
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, SplitMix64& rng) {
    if (k > pool.size()) k = pool.size();
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace dynjt
