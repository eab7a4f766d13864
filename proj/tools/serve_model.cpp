// serve-model: expose a local weights file over the remote oracle protocol,
// handy for exercising the HTTP client path end to end.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "psoattack/classifier.hpp"

using namespace psoattack;

int main(int argc, char** argv) {
    CLI::App app{"Serve a dense classifier over HTTP"};
    std::string weights_path;
    std::string host = "127.0.0.1";
    int port = 8080;
    app.add_option("--model", weights_path, "weights file")->required();
    app.add_option("--host", host, "bind address");
    app.add_option("--port", port, "bind port");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    DenseClassifier model = DenseClassifier::load(weights_path);
    httplib::Server server;
    server.Post("/predict", [&](const httplib::Request& req, httplib::Response& res) {
        try {
            auto body = nlohmann::json::parse(req.body);
            auto input = body.at("inputs").at(0).get<std::vector<double>>();
            auto probs = model.probabilities(input);
            nlohmann::json reply;
            reply["probabilities"] = nlohmann::json::array({probs});
            res.set_content(reply.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(std::string("{\"error\":\"") + e.what() + "\"}",
                            "application/json");
        }
    });

    std::cout << "serving " << weights_path << " on http://" << host << ":" << port
              << "/predict" << std::endl;
    server.listen(host, port);
    return 0;
}
