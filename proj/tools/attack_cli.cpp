// attack: run AdversarialPSO or SWISS over a dataset against a local weights
// file or a remote probability oracle, writing a line-delimited report.

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "psoattack/batch.hpp"
#include "psoattack/classifier.hpp"
#include "psoattack/remote_model.hpp"

using namespace psoattack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOracleUnreachable = 3;

bool parse_mode(const std::string& text, BatchConfig& config) {
    if (text == "untargeted") {
        config.mode = BatchMode::Untargeted;
        return true;
    }
    if (text == "targeted-all") {
        config.mode = BatchMode::TargetedAll;
        return true;
    }
    if (text.rfind("targeted=", 0) == 0) {
        config.mode = BatchMode::TargetedSingle;
        try {
            config.target_label = std::stoul(text.substr(9));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }
    return false;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-box adversarial attacks via particle swarm optimization"};

    std::string attack_name;
    std::string model_spec;
    std::string data_path;
    std::string format_name = "csv-flat";
    std::string mode_text = "untargeted";
    std::string out_path;
    std::string scheme_name = "sync";
    std::string preset;
    std::uint64_t seed = 0;
    std::uint64_t budget = 25000;
    std::size_t workers = 1;
    std::optional<std::size_t> limit;
    double timeout_seconds = 10.0;

    AttackParams params; // CLI defaults follow the CIFAR-10 parameter block

    app.add_option("attack", attack_name, "pso or swiss")
        ->required()
        ->check(CLI::IsMember({"pso", "swiss"}));
    app.add_option("--model", model_spec, "weights file or http(s) endpoint")->required();
    app.add_option("--data", data_path, "dataset path")->required();
    app.add_option("--format", format_name, "csv-flat or png-dir")
        ->check(CLI::IsMember({"csv-flat", "png-dir"}));
    app.add_option("--mode", mode_text, "untargeted | targeted=<L> | targeted-all");
    app.add_option("--out", out_path, "report path (default stdout)");
    app.add_option("--seed", seed, "master seed for per-sample RNG streams");
    app.add_option("--budget", budget, "per-sample query budget");
    auto* step_opt = app.add_option("--step", params.step_size, "initial step size");
    auto* linf_opt = app.add_option("--linf", params.linf_bound, "L-infinity bound");
    auto* particles_opt = app.add_option("--particles", params.particles, "swarm size");
    auto* change_opt = app.add_option("--change-rate", params.change_rate,
                                      "fraction of coordinates perturbed");
    auto* penalty_opt = app.add_option("--penalty", params.penalty_weight,
                                       "L2 distance penalty weight");
    auto* mutation_opt = app.add_option("--mutation", params.mutation_prob,
                                        "per-particle mutation probability");
    auto* c1_opt = app.add_option("--c1", params.velocity.c1, "exploration weight");
    auto* c2_opt = app.add_option("--c2", params.velocity.c2, "exploitation weight");
    auto* tmax_opt = app.add_option("--tmax", params.max_iterations, "iteration cap");
    app.add_option("--fitmax", params.fitness_stop,
                   "stopping fitness (default: derived misclassification certificate)");
    app.add_option("--scheme", scheme_name, "velocity scheme")
        ->check(CLI::IsMember({"inertia", "constriction", "sync", "async"}));
    app.add_flag("--dynamic-c", params.dynamic_c_weights,
                 "ramp exploration up and exploitation down over iterations");
    app.add_option("--preset", preset, "parameter preset")
        ->check(CLI::IsMember({"mnist", "cifar10"}));
    app.add_option("--workers", workers, "concurrent sample runs");
    app.add_option("--limit", limit, "attack only the first N correctly classified samples");
    app.add_option("--timeout", timeout_seconds, "remote request timeout in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    BatchConfig config;
    config.attack = attack_name == "pso" ? AttackKind::Pso : AttackKind::Swiss;
    config.master_seed = seed;
    config.workers = workers;
    config.filters.max_attempted = limit;
    if (!parse_mode(mode_text, config)) {
        std::cerr << "invalid --mode: " << mode_text << "\n";
        return kExitConfig;
    }

    if (preset == "mnist") {
        AttackParams base = AttackParams::mnist_preset();
        if (!*step_opt) params.step_size = base.step_size;
        if (!*linf_opt) params.linf_bound = base.linf_bound;
        if (!*particles_opt) params.particles = base.particles;
        if (!*change_opt) params.change_rate = base.change_rate;
        if (!*penalty_opt) params.penalty_weight = base.penalty_weight;
        if (!*mutation_opt) params.mutation_prob = base.mutation_prob;
        if (!*c1_opt) params.velocity.c1 = base.velocity.c1;
        if (!*c2_opt) params.velocity.c2 = base.velocity.c2;
    } else if (preset == "cifar10") {
        AttackParams base = AttackParams::cifar10_preset();
        if (!*step_opt) params.step_size = base.step_size;
        if (!*linf_opt) params.linf_bound = base.linf_bound;
        if (!*particles_opt) params.particles = base.particles;
        if (!*change_opt) params.change_rate = base.change_rate;
        if (!*penalty_opt) params.penalty_weight = base.penalty_weight;
        if (!*mutation_opt) params.mutation_prob = base.mutation_prob;
        if (!*c1_opt) params.velocity.c1 = base.velocity.c1;
        if (!*c2_opt) params.velocity.c2 = base.velocity.c2;
        params.dynamic_c_weights = true;
    }
    // the published untargeted SWISS runs use a three-particle swarm
    if (config.attack == AttackKind::Swiss && !*particles_opt && preset.empty())
        params.particles = 3;

    if (scheme_name == "inertia") params.velocity.scheme = VelocityScheme::InertiaOnly;
    else if (scheme_name == "constriction") params.velocity.scheme = VelocityScheme::ConstrictionOnly;
    else if (scheme_name == "sync") params.velocity.scheme = VelocityScheme::Synchronous;
    else params.velocity.scheme = VelocityScheme::Asynchronous;

    params.velocity.t_max = params.max_iterations;
    if (*tmax_opt) params.velocity.t_max = params.max_iterations;
    params.query_budget = budget;

    try {
        params.validate();
    } catch (const std::exception& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitConfig;
    }

    std::vector<SampleRecord> samples;
    try {
        samples = load_dataset(data_path, dataset_format_from_name(format_name));
    } catch (const std::exception& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::unique_ptr<PredictionModel> model;
    const bool remote = model_spec.rfind("http://", 0) == 0 || model_spec.rfind("https://", 0) == 0;
    try {
        if (remote) {
            std::size_t dim = samples.empty() ? 0 : samples.front().image.dim();
            model = std::make_unique<RemoteModel>(model_spec, timeout_seconds, dim);
            if (!samples.empty()) model->probabilities(samples.front().image.data); // reachability
        } else {
            model = std::make_unique<DenseClassifier>(DenseClassifier::load(model_spec));
        }
    } catch (const OracleError& e) {
        std::cerr << "oracle unreachable: " << e.what() << "\n";
        return kExitOracleUnreachable;
    } catch (const std::exception& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitConfig;
    }

    BatchReport report = run_batch(samples, params, *model, config);
    try {
        if (out_path.empty())
            emit_report(report, std::cout);
        else
            emit_report(report, out_path);
    } catch (const std::exception& e) {
        std::cerr << "report error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::cerr << "attempted " << report.aggregates.attempted << ", successes "
              << report.aggregates.successes << ", skipped "
              << report.aggregates.skipped_misclassified << " misclassified\n";
    return kExitOk;
}
