#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace altsent::rng {

// SplitMix64 (Steele et al.), used to derive independent sub-seeds from a
// master seed so parallel work items get fixed streams regardless of
// scheduling.
inline std::uint64_t split_mix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0xa0761d6478bd642fULL * (index + 1));
    return split_mix64(s);
}

// Thin wrapper over mt19937_64 with explicitly specified draw procedures.
// std::uniform_int_distribution is implementation-defined, so bounded draws
// use rejection sampling on the raw 64-bit output instead.
class Engine {
public:
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform real in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 gen_;
};

// Fisher-Yates shuffle driven by Engine::next_below.
template <typename T>
void shuffle(std::vector<T>& items, Engine& eng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(eng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace altsent::rng
