#include "psoattack/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace psoattack {

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "softmax") return Activation::Softmax;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
    }
    return "identity";
}

std::vector<double> softmax(std::span<const double> logits) {
    double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

DenseClassifier::DenseClassifier(std::size_t input_dim, std::size_t class_count,
                                 std::vector<DenseLayer> layers)
    : input_dim_(input_dim), class_count_(class_count), layers_(std::move(layers)) {
    if (layers_.empty()) throw std::invalid_argument("classifier needs at least one layer");
    std::size_t width = input_dim_;
    for (const auto& layer : layers_) {
        if (layer.rows != width)
            throw std::invalid_argument("layer input width " + std::to_string(layer.rows) +
                                        " does not chain with previous width " +
                                        std::to_string(width));
        if (layer.weights.size() != layer.rows * layer.cols)
            throw std::invalid_argument("layer weight count != rows*cols");
        if (layer.bias.size() != layer.cols)
            throw std::invalid_argument("layer bias length != cols");
        width = layer.cols;
    }
    if (width != class_count_)
        throw std::invalid_argument("final layer width != class_count");
    if (layers_.back().activation != Activation::Softmax)
        throw std::invalid_argument("final layer activation must be softmax");
}

std::vector<double> DenseClassifier::probabilities(std::span<const double> image) const {
    if (image.size() != input_dim_)
        throw std::invalid_argument("forward: input length mismatch");
    std::vector<double> current(image.begin(), image.end());
    for (const auto& layer : layers_) {
        std::vector<double> next(layer.cols, 0.0);
        for (std::size_t i = 0; i < layer.rows; ++i) {
            const double x = current[i];
            if (x == 0.0) continue;
            const double* row = layer.weights.data() + i * layer.cols;
            for (std::size_t j = 0; j < layer.cols; ++j) next[j] += x * row[j];
        }
        for (std::size_t j = 0; j < layer.cols; ++j) next[j] += layer.bias[j];
        switch (layer.activation) {
        case Activation::Relu:
            for (double& v : next) v = std::max(v, 0.0);
            break;
        case Activation::Softmax:
            next = softmax(next);
            break;
        case Activation::Identity:
            break;
        }
        current = std::move(next);
    }
    return current;
}

DenseClassifier DenseClassifier::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weights file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("weights file " + path + " is not valid JSON: " + e.what());
    }
    std::vector<DenseLayer> layers;
    for (const auto& item : doc.at("layers")) {
        DenseLayer layer;
        layer.rows = item.at("rows").get<std::size_t>();
        layer.cols = item.at("cols").get<std::size_t>();
        layer.weights = item.at("weights").get<std::vector<double>>();
        layer.bias = item.at("bias").get<std::vector<double>>();
        layer.activation = activation_from_name(item.at("activation").get<std::string>());
        layers.push_back(std::move(layer));
    }
    return DenseClassifier(doc.at("input_dim").get<std::size_t>(),
                           doc.at("class_count").get<std::size_t>(), std::move(layers));
}

void DenseClassifier::save(const std::string& path) const {
    nlohmann::json doc;
    doc["input_dim"] = input_dim_;
    doc["class_count"] = class_count_;
    doc["layers"] = nlohmann::json::array();
    for (const auto& layer : layers_) {
        doc["layers"].push_back({{"rows", layer.rows},
                                 {"cols", layer.cols},
                                 {"weights", layer.weights},
                                 {"bias", layer.bias},
                                 {"activation", activation_name(layer.activation)}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write weights file: " + path);
    out << doc;
}

} // namespace psoattack
