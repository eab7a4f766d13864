#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psoattack/oracle.hpp"

namespace psoattack {

// HTTP client for a remote probability oracle.
//
//   POST <endpoint>  {"inputs": [[f64, ...]]}   ->   {"probabilities": [[f64, ...]]}
//
// Responses are validated, never repaired: a non-normalized vector is an
// oracle error, transport failures and 5xx are retryable oracle errors.
class RemoteModel : public PredictionModel {
public:
    explicit RemoteModel(std::string endpoint, double timeout_seconds = 10.0,
                         std::size_t expected_input_dim = 0);

    std::vector<double> probabilities(std::span<const double> image) const override;
    std::size_t input_dim() const override { return expected_input_dim_; }

    const std::string& endpoint() const { return endpoint_; }

private:
    std::string base_url_;
    std::string path_;
    std::string endpoint_;
    double timeout_seconds_;
    std::size_t expected_input_dim_;
};

} // namespace psoattack
