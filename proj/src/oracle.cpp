#include "psoattack/oracle.hpp"

#include <cmath>

namespace psoattack {

const char* phase_name(QueryPhase phase) {
    switch (phase) {
    case QueryPhase::Init: return "init";
    case QueryPhase::Optimize: return "optimize";
    case QueryPhase::Baseline: return "baseline";
    case QueryPhase::Centroid: return "centroid";
    case QueryPhase::Mutation: return "mutation";
    case QueryPhase::Reduction: return "reduction";
    }
    return "unknown";
}

std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

void validate_probabilities(std::span<const double> probabilities) {
    if (probabilities.empty())
        throw OracleError("oracle returned an empty probability vector", false);
    double sum = 0.0;
    for (double p : probabilities) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
            throw OracleError("oracle probability outside [0,1]", false);
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw OracleError("oracle probabilities do not sum to 1 (sum=" +
                              std::to_string(sum) + ")",
                          false);
}

OracleResponse QueryOracle::predict(std::span<const double> image, QueryPhase phase) {
    if (model_.input_dim() != 0 && image.size() != model_.input_dim())
        throw std::invalid_argument("predict: image length " + std::to_string(image.size()) +
                                    " != model input_dim " +
                                    std::to_string(model_.input_dim()));
    // a failed model call must not move the ledger
    std::vector<double> probs = model_.probabilities(image);
    validate_probabilities(probs);

    OracleResponse response;
    response.predicted_label = argmax_lowest(probs);
    response.probabilities = std::move(probs);
    response.query_index = ledger_.record(phase);
    return response;
}

} // namespace psoattack
