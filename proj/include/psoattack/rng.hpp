#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace psoattack {

// Seedable generator with hand-rolled draws so that replaying a seed gives
// the same stream on every standard library (std distributions are not
// portable across implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n)
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

    // +1 or -1 with equal probability
    double coin_sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

    bool bernoulli(double p) { return uniform01() < p; }

    // k distinct indices from [0, n), ascending
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
};

} // namespace psoattack
