#pragma once

#include <cstddef>
#include <span>

namespace psoattack {

struct Distances {
    std::size_t l0 = 0; // coordinates differing by more than 1e-9
    double l2 = 0.0;
    double linf = 0.0;
};

Distances distances(std::span<const double> source, std::span<const double> adversarial);

} // namespace psoattack
