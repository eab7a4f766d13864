#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "psoattack/classifier.hpp"
#include "psoattack/oracle.hpp"
#include "psoattack/rng.hpp"

using namespace psoattack;

namespace {

DenseLayer layer(std::size_t rows, std::size_t cols, std::vector<double> weights,
                 std::vector<double> bias, Activation activation) {
    return DenseLayer{rows, cols, std::move(weights), std::move(bias), activation};
}

// independent forward pass used as the reference for the real one: plain
// index arithmetic, no shared code with DenseClassifier
std::vector<double> reference_forward(const std::vector<DenseLayer>& layers,
                                      std::vector<double> x) {
    for (const auto& l : layers) {
        std::vector<double> y(l.cols, 0.0);
        for (std::size_t j = 0; j < l.cols; ++j) {
            double acc = l.bias[j];
            for (std::size_t i = 0; i < l.rows; ++i) acc += x[i] * l.weights[i * l.cols + j];
            y[j] = acc;
        }
        if (l.activation == Activation::Relu)
            for (auto& v : y) v = v > 0.0 ? v : 0.0;
        if (l.activation == Activation::Softmax) {
            double peak = y[0];
            for (double v : y) peak = std::max(peak, v);
            double sum = 0.0;
            for (auto& v : y) {
                v = std::exp(v - peak);
                sum += v;
            }
            for (auto& v : y) v /= sum;
        }
        x = std::move(y);
    }
    return x;
}

} // namespace

TEST_CASE("identity weights and symmetric logits give a uniform pair") {
    DenseClassifier model(2, 2, {layer(2, 2, {1, 0, 0, 1}, {0, 0}, Activation::Softmax)});
    auto probs = model.probabilities(std::vector<double>{0.0, 0.0});
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("all-zero weights give uniform probabilities for any input") {
    DenseClassifier model(3, 4,
                          {layer(3, 4, std::vector<double>(12, 0.0), {0, 0, 0, 0},
                                 Activation::Softmax)});
    auto probs = model.probabilities(std::vector<double>{0.1, 0.9, 0.4});
    for (double p : probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("relu that zeroes the hidden vector leaves softmax of the final bias") {
    // hidden pre-activations forced negative by the bias
    auto hidden = layer(2, 2, {1, 0, 0, 1}, {-10.0, -10.0}, Activation::Relu);
    auto out = layer(2, 3, std::vector<double>(6, 0.7), {0.3, -0.2, 1.1}, Activation::Softmax);
    DenseClassifier model(2, 3, {hidden, out});
    auto probs = model.probabilities(std::vector<double>{0.5, 0.5});
    auto expected = softmax(std::vector<double>{0.3, -0.2, 1.1});
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(probs[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("two-layer network matches the hand-rolled reference forward pass") {
    std::vector<DenseLayer> layers{
        layer(2, 2, {0.4, -0.3, 0.8, 0.25}, {0.05, -0.1}, Activation::Relu),
        layer(2, 2, {1.2, -0.7, -0.4, 0.9}, {0.0, 0.2}, Activation::Softmax)};
    DenseClassifier model(2, 2, layers);
    std::vector<double> input{0.6, 0.2};
    auto probs = model.probabilities(input);
    auto expected = reference_forward(layers, input);
    CHECK(probs[0] == doctest::Approx(expected[0]).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(expected[1]).epsilon(1e-12));

    // and across random networks
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> w1(6), b1(3), w2(6), b2(2), x(2);
        for (auto* block : {&w1, &b1, &w2, &b2})
            for (double& v : *block) v = rng.uniform01() * 2.0 - 1.0;
        for (double& v : x) v = rng.uniform01();
        std::vector<DenseLayer> net{layer(2, 3, w1, b1, Activation::Relu),
                                    layer(3, 2, w2, b2, Activation::Softmax)};
        DenseClassifier m(2, 2, net);
        auto got = m.probabilities(x);
        auto ref = reference_forward(net, x);
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("logistic pair comes out as sigmoids of the logit difference") {
    // class-0 weight row (1,-1), class 1 held at zero
    DenseClassifier model(2, 2, {layer(2, 2, {1, 0, -1, 0}, {0, 0}, Activation::Softmax)});
    auto probs = model.probabilities(std::vector<double>{1.0, 0.0});
    double expected0 = 1.0 / (1.0 + std::exp(-1.0)); // sigma(1)
    CHECK(probs[0] == doctest::Approx(expected0).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(1.0 - expected0).epsilon(1e-12));
}

TEST_CASE("forward is deterministic within a process") {
    DenseClassifier model(2, 2,
                          {layer(2, 2, {0.3, -0.2, 0.9, 0.1}, {0.2, -0.4},
                                 Activation::Softmax)});
    std::vector<double> x{0.25, 0.75};
    auto a = model.probabilities(x);
    auto b = model.probabilities(x);
    CHECK(a == b); // bitwise
}

TEST_CASE("classifier construction validates chaining and the final activation") {
    CHECK_THROWS_AS(DenseClassifier(2, 2,
                                    {layer(3, 2, std::vector<double>(6, 0.0), {0, 0},
                                           Activation::Softmax)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DenseClassifier(2, 2,
                                    {layer(2, 2, std::vector<double>(4, 0.0), {0, 0},
                                           Activation::Identity)}),
                    std::invalid_argument);
}

TEST_CASE("predict counts queries: indices 1, 2, 3 and per-phase totals") {
    DenseClassifier model(2, 2, {layer(2, 2, {1, 0, 0, 1}, {0, 0}, Activation::Softmax)});
    QueryOracle oracle(model);
    std::vector<double> x{0.5, 0.5};
    CHECK(oracle.predict(x, QueryPhase::Init).query_index == 1);
    CHECK(oracle.predict(x, QueryPhase::Optimize).query_index == 2);
    CHECK(oracle.predict(x, QueryPhase::Optimize).query_index == 3);
    auto snapshot = oracle.snapshot();
    CHECK(snapshot.total == 3);
    CHECK(snapshot.phase(QueryPhase::Init) == 1);
    CHECK(snapshot.phase(QueryPhase::Optimize) == 2);
    std::uint64_t phase_sum = 0;
    for (auto count : snapshot.per_phase) phase_sum += count;
    CHECK(phase_sum == snapshot.total);
}

TEST_CASE("predict rejects inputs of the wrong length without touching the ledger") {
    DenseClassifier model(2, 2, {layer(2, 2, {1, 0, 0, 1}, {0, 0}, Activation::Softmax)});
    QueryOracle oracle(model);
    CHECK_THROWS_AS(oracle.predict(std::vector<double>{0.5}, QueryPhase::Init),
                    std::invalid_argument);
    CHECK(oracle.total_queries() == 0);
}

TEST_CASE("predicted label is the argmax with the lowest index on ties") {
    CHECK(argmax_lowest(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(argmax_lowest(std::vector<double>{0.1, 0.6, 0.3}) == 1);
    CHECK(argmax_lowest(std::vector<double>{0.4, 0.2, 0.4}) == 0);

    // exact tie through a real model: zero weights, two classes
    DenseClassifier model(2, 2,
                          {layer(2, 2, std::vector<double>(4, 0.0), {0, 0},
                                 Activation::Softmax)});
    QueryOracle oracle(model);
    CHECK(oracle.predict(std::vector<double>{0.8, 0.1}, QueryPhase::Init).predicted_label == 0);
}

TEST_CASE("argmax is invariant under strictly monotone logit transforms") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t classes = 2 + rng.uniform_index(8);
        std::vector<double> logits(classes);
        for (double& v : logits) v = rng.uniform01() * 8.0 - 4.0;
        double scale = 0.1 + rng.uniform01() * 5.0; // strictly increasing affine map
        double shift = rng.uniform01() * 10.0 - 5.0;
        std::vector<double> mapped(classes);
        for (std::size_t i = 0; i < classes; ++i) mapped[i] = scale * logits[i] + shift;
        CHECK(argmax_lowest(softmax(logits)) == argmax_lowest(softmax(mapped)));
    }
}

TEST_CASE("probability validation accepts softmax output and rejects junk") {
    CHECK_NOTHROW(validate_probabilities(std::vector<double>{0.7, 0.3}));
    CHECK_THROWS_AS(validate_probabilities(std::vector<double>{0.8, 0.8}), OracleError);
    CHECK_THROWS_AS(validate_probabilities(std::vector<double>{-0.1, 1.1}), OracleError);
    CHECK_THROWS_AS(validate_probabilities(std::vector<double>{}), OracleError);
}

TEST_CASE("weights round-trip through the file format") {
    std::vector<DenseLayer> layers{
        layer(3, 2, {0.25, -0.5, 1.0, 0.125, -0.75, 0.375}, {0.5, -0.25}, Activation::Relu),
        layer(2, 2, {1.0, 0.5, -0.5, 0.25}, {0.0, 0.125}, Activation::Softmax)};
    DenseClassifier model(3, 2, layers);
    std::string path = "weights_roundtrip_test.json";
    model.save(path);
    DenseClassifier loaded = DenseClassifier::load(path);
    std::remove(path.c_str());

    CHECK(loaded.input_dim() == 3);
    CHECK(loaded.class_count() == 2);
    std::vector<double> x{0.1, 0.7, 0.3};
    CHECK(loaded.probabilities(x) == model.probabilities(x)); // bitwise
}
