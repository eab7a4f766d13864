#include "psoattack/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psoattack {

ImageVector::ImageVector(std::vector<double> values, ImageShape s)
    : data(std::move(values)), shape(s) {
    if (data.empty()) throw std::invalid_argument("ImageVector: empty data");
    if (shape.size() != data.size())
        throw std::invalid_argument("ImageVector: shape product " +
                                    std::to_string(shape.size()) +
                                    " != data length " + std::to_string(data.size()));
    for (double v : data)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("ImageVector: value outside [0,1]");
}

ImageVector ImageVector::flat(std::vector<double> values) {
    ImageShape s{1, values.size(), 1};
    return ImageVector(std::move(values), s);
}

ImageShape infer_shape(std::size_t dim) {
    for (std::size_t channels : {std::size_t{1}, std::size_t{3}}) {
        if (dim % channels != 0) continue;
        auto side = static_cast<std::size_t>(std::lround(std::sqrt(double(dim / channels))));
        if (side > 0 && side * side * channels == dim) return {side, side, channels};
    }
    return {1, dim, 1};
}

} // namespace psoattack
