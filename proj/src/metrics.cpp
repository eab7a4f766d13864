#include "psoattack/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace psoattack {

Distances distances(std::span<const double> source, std::span<const double> adversarial) {
    if (source.size() != adversarial.size())
        throw std::invalid_argument("distances: length mismatch");
    Distances d;
    double sq = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
        double diff = std::abs(source[i] - adversarial[i]);
        if (diff > 1e-9) ++d.l0;
        sq += diff * diff;
        if (diff > d.linf) d.linf = diff;
    }
    d.l2 = std::sqrt(sq);
    return d;
}

} // namespace psoattack
