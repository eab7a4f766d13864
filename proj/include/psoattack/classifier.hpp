#pragma once

#include <string>
#include <vector>

#include "psoattack/oracle.hpp"

namespace psoattack {

enum class Activation { Relu, Softmax, Identity };

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation a);

struct DenseLayer {
    std::size_t rows = 0; // input width
    std::size_t cols = 0; // output width
    std::vector<double> weights; // row-major, rows x cols
    std::vector<double> bias;    // length cols
    Activation activation = Activation::Identity;
};

// Local feed-forward victim: dense layers only, final activation softmax.
class DenseClassifier : public PredictionModel {
public:
    DenseClassifier(std::size_t input_dim, std::size_t class_count,
                    std::vector<DenseLayer> layers);

    static DenseClassifier load(const std::string& path);
    void save(const std::string& path) const;

    std::vector<double> probabilities(std::span<const double> image) const override;
    std::size_t input_dim() const override { return input_dim_; }
    std::size_t class_count() const { return class_count_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

private:
    std::size_t input_dim_;
    std::size_t class_count_;
    std::vector<DenseLayer> layers_;
};

std::vector<double> softmax(std::span<const double> logits);

} // namespace psoattack
