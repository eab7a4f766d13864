#include "psoattack/remote_model.hpp"

#include <chrono>
#include <cmath>

#include "httplib.h"
#include "json.hpp"

namespace psoattack {

namespace {

// split "http://host:port/some/path" into base url and path
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("remote endpoint must include a scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

} // namespace

RemoteModel::RemoteModel(std::string endpoint, double timeout_seconds,
                         std::size_t expected_input_dim)
    : endpoint_(std::move(endpoint)),
      timeout_seconds_(timeout_seconds),
      expected_input_dim_(expected_input_dim) {
    std::tie(base_url_, path_) = split_endpoint(endpoint_);
}

std::vector<double> RemoteModel::probabilities(std::span<const double> image) const {
    nlohmann::json body;
    body["inputs"] = nlohmann::json::array();
    body["inputs"].push_back(std::vector<double>(image.begin(), image.end()));

    httplib::Client client(base_url_);
    auto timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds_ * 1000));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto result = client.Post(path_, body.dump(), "application/json");
    if (!result)
        throw OracleError("remote oracle transport failure: " + httplib::to_string(result.error()),
                          true);
    if (result->status < 200 || result->status >= 300)
        throw OracleError("remote oracle returned HTTP " + std::to_string(result->status),
                          result->status >= 500);

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw OracleError(std::string("remote oracle body is not valid JSON: ") + e.what(), false);
    }
    if (!doc.contains("probabilities") || !doc["probabilities"].is_array() ||
        doc["probabilities"].size() != 1 || !doc["probabilities"][0].is_array())
        throw OracleError("remote oracle body missing probabilities[[...]]", false);

    std::vector<double> probs;
    try {
        probs = doc["probabilities"][0].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw OracleError(std::string("remote oracle probabilities are not numbers: ") + e.what(),
                          false);
    }
    validate_probabilities(probs);
    return probs;
}

} // namespace psoattack
