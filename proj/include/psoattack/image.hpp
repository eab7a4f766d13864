#pragma once

#include <cstddef>
#include <vector>

namespace psoattack {

struct ImageShape {
    std::size_t height = 1;
    std::size_t width = 1;
    std::size_t channels = 1;

    std::size_t size() const { return height * width * channels; }
    bool operator==(const ImageShape&) const = default;
};

// A flat point in [0,1]^d with shape metadata; both the attack's search
// variable and the oracle's input.
struct ImageVector {
    std::vector<double> data;
    ImageShape shape;

    ImageVector() = default;
    ImageVector(std::vector<double> values, ImageShape s);

    // flat vector with shape (1, d, 1)
    static ImageVector flat(std::vector<double> values);

    std::size_t dim() const { return data.size(); }
};

// Guess (height, width, channels) for a flat pixel row: square grayscale,
// then square RGB, else (1, d, 1).
ImageShape infer_shape(std::size_t dim);

} // namespace psoattack
