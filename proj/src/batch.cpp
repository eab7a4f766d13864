#include "psoattack/batch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "psoattack/pso_attack.hpp"
#include "psoattack/swiss_attack.hpp"

namespace psoattack {

const char* attack_kind_name(AttackKind kind) {
    return kind == AttackKind::Pso ? "pso" : "swiss";
}

std::uint64_t derive_sample_seed(std::uint64_t master_seed, const std::string& id,
                                 std::optional<std::size_t> target) {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a over the sample id
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t mixed = h ^ (master_seed + 0x9E3779B97F4A7C15ULL);
    if (target) mixed += (*target + 1) * 0xBF58476D1CE4E5B9ULL;
    // splitmix64 finalizer
    mixed ^= mixed >> 30;
    mixed *= 0xBF58476D1CE4E5B9ULL;
    mixed ^= mixed >> 27;
    mixed *= 0x94D049BB133111EBULL;
    mixed ^= mixed >> 31;
    return mixed;
}

BatchAggregates aggregate_outcomes(const std::vector<SampleOutcome>& outcomes) {
    BatchAggregates agg;
    agg.samples_seen = outcomes.size();
    double sum_l2 = 0.0, sum_l0 = 0.0, sum_linf = 0.0;
    std::vector<double> query_totals;
    for (const auto& outcome : outcomes) {
        switch (outcome.status) {
        case OutcomeStatus::SkippedMisclassified:
            ++agg.skipped_misclassified;
            continue;
        case OutcomeStatus::SkippedTargetIsOriginal:
            ++agg.skipped_target_is_original;
            continue;
        case OutcomeStatus::Errored:
            ++agg.errored;
            continue;
        case OutcomeStatus::Attacked:
            break;
        }
        ++agg.attempted;
        const AttackResult& result = *outcome.result;
        query_totals.push_back(static_cast<double>(result.queries.total));
        if (result.success) {
            ++agg.successes;
            sum_l2 += result.l2;
            sum_l0 += static_cast<double>(result.l0);
            sum_linf += result.linf;
        }
    }
    if (agg.attempted > 0) {
        agg.success_rate = static_cast<double>(agg.successes) / agg.attempted;
        double total = 0.0;
        for (double q : query_totals) total += q;
        agg.avg_queries = total / query_totals.size();
        std::sort(query_totals.begin(), query_totals.end());
        std::size_t mid = query_totals.size() / 2;
        agg.median_queries = query_totals.size() % 2 == 1
                                 ? query_totals[mid]
                                 : (query_totals[mid - 1] + query_totals[mid]) / 2.0;
    }
    if (agg.successes > 0) {
        agg.avg_l2 = sum_l2 / agg.successes;
        agg.avg_l0 = sum_l0 / agg.successes;
        agg.avg_linf = sum_linf / agg.successes;
    }
    return agg;
}

namespace {

struct Job {
    const SampleRecord* sample = nullptr;
    std::optional<std::size_t> target;
};

SampleOutcome run_job(const Job& job, const AttackParams& base_params,
                      const PredictionModel& model, const BatchConfig& config) {
    SampleOutcome outcome;
    outcome.id = job.sample->id;
    outcome.attack = config.attack;
    outcome.seed = derive_sample_seed(config.master_seed, job.sample->id, job.target);

    AttackParams params = base_params;
    if (job.target) {
        params.mode = AttackMode::Targeted;
        params.target_label = *job.target;
    } else {
        params.mode = AttackMode::Untargeted;
    }

    auto started = std::chrono::steady_clock::now();
    try {
        QueryOracle oracle(model);
        if (config.attack == AttackKind::Pso) {
            PsoAttackRun run(job.sample->image, params, oracle, outcome.seed);
            outcome.result = run.run(job.sample->true_label);
        } else {
            SwissAttackRun run(job.sample->image, params, oracle, outcome.seed);
            outcome.result = run.run(job.sample->true_label);
        }
        outcome.status = OutcomeStatus::Attacked;
    } catch (const MisclassifiedError&) {
        outcome.status = OutcomeStatus::SkippedMisclassified;
    } catch (const std::exception& e) {
        outcome.status = OutcomeStatus::Errored;
        outcome.error = e.what();
    }
    auto finished = std::chrono::steady_clock::now();
    outcome.elapsed_ms =
        std::chrono::duration<double, std::milli>(finished - started).count();
    return outcome;
}

} // namespace

BatchReport run_batch(const std::vector<SampleRecord>& samples, const AttackParams& params,
                      const PredictionModel& model, const BatchConfig& config) {
    BatchReport report;

    // With a cap, pick the first N correctly classified samples up front so
    // the attacked set does not depend on worker scheduling.
    std::vector<const SampleRecord*> selected;
    if (config.filters.max_attempted) {
        for (const auto& sample : samples) {
            if (selected.size() >= *config.filters.max_attempted) break;
            auto probs = model.probabilities(sample.image.data);
            if (argmax_lowest(probs) == sample.true_label) {
                selected.push_back(&sample);
            } else {
                SampleOutcome outcome;
                outcome.id = sample.id;
                outcome.attack = config.attack;
                outcome.status = OutcomeStatus::SkippedMisclassified;
                report.outcomes.push_back(std::move(outcome));
            }
        }
    } else {
        for (const auto& sample : samples) selected.push_back(&sample);
    }

    std::vector<Job> jobs;
    std::vector<SampleOutcome> preset_outcomes; // skipped without running
    for (const SampleRecord* sample : selected) {
        switch (config.mode) {
        case BatchMode::Untargeted:
            jobs.push_back({sample, std::nullopt});
            break;
        case BatchMode::TargetedSingle:
            if (sample->true_label == config.target_label) {
                SampleOutcome outcome;
                outcome.id = sample->id;
                outcome.attack = config.attack;
                outcome.status = OutcomeStatus::SkippedTargetIsOriginal;
                preset_outcomes.push_back(std::move(outcome));
            } else {
                jobs.push_back({sample, config.target_label});
            }
            break;
        case BatchMode::TargetedAll: {
            auto classes = model.probabilities(sample->image.data).size();
            for (std::size_t label = 0; label < classes; ++label)
                if (label != sample->true_label) jobs.push_back({sample, label});
            break;
        }
        }
    }

    std::vector<SampleOutcome> job_outcomes(jobs.size());
    const std::size_t worker_count =
        std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
    if (worker_count <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            job_outcomes[i] = run_job(jobs[i], params, model, config);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) break;
                job_outcomes[i] = run_job(jobs[i], params, model, config);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < worker_count; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    for (auto& outcome : preset_outcomes) report.outcomes.push_back(std::move(outcome));
    for (auto& outcome : job_outcomes) report.outcomes.push_back(std::move(outcome));
    report.aggregates = aggregate_outcomes(report.outcomes);
    return report;
}

namespace {

nlohmann::ordered_json sample_line(const SampleOutcome& outcome) {
    nlohmann::ordered_json line;
    line["id"] = outcome.id;
    line["attack"] = attack_kind_name(outcome.attack);
    if (outcome.status == OutcomeStatus::Errored) {
        line["success"] = false;
        line["error"] = outcome.error;
        line["seed"] = outcome.seed;
        line["elapsed_ms"] = outcome.elapsed_ms;
        return line;
    }
    const AttackResult& result = *outcome.result;
    line["success"] = result.success;
    line["original_label"] = result.original_label;
    line["final_label"] = result.final_label;
    if (result.target_label) line["target_label"] = *result.target_label;
    line["queries_total"] = result.queries.total;
    nlohmann::ordered_json phases;
    for (std::size_t i = 0; i < kPhaseCount; ++i)
        phases[phase_name(static_cast<QueryPhase>(i))] = result.queries.per_phase[i];
    line["queries_by_phase"] = std::move(phases);
    if (result.success) {
        line["l0"] = result.l0;
        line["l2"] = result.l2;
        line["linf"] = result.linf;
    } else {
        line["l0"] = nullptr;
        line["l2"] = nullptr;
        line["linf"] = nullptr;
    }
    line["iterations"] = result.iterations_used;
    line["seed"] = outcome.seed;
    line["elapsed_ms"] = outcome.elapsed_ms;
    if (!result.saliency_mask.empty()) {
        line["saliency_mask"] = result.saliency_mask;
    }
    return line;
}

template <typename T>
nlohmann::ordered_json json_or_null(const std::optional<T>& value) {
    if (value) return *value;
    return nullptr;
}

} // namespace

void emit_report(const BatchReport& report, std::ostream& out) {
    for (const auto& outcome : report.outcomes) {
        if (outcome.status == OutcomeStatus::Attacked ||
            outcome.status == OutcomeStatus::Errored)
            out << sample_line(outcome).dump() << '\n';
    }
    const BatchAggregates& agg = report.aggregates;
    nlohmann::ordered_json line;
    line["type"] = "aggregate";
    line["samples_seen"] = agg.samples_seen;
    line["skipped_misclassified"] = agg.skipped_misclassified;
    line["skipped_target_is_original"] = agg.skipped_target_is_original;
    line["errored"] = agg.errored;
    line["attempted"] = agg.attempted;
    line["successes"] = agg.successes;
    line["success_rate"] = json_or_null(agg.success_rate);
    line["avg_l2"] = json_or_null(agg.avg_l2);
    line["avg_l0"] = json_or_null(agg.avg_l0);
    line["avg_linf"] = json_or_null(agg.avg_linf);
    line["avg_queries"] = json_or_null(agg.avg_queries);
    line["median_queries"] = json_or_null(agg.median_queries);
    line["distance_averages"] = "successful runs only";
    line["query_averages"] = "all attempted runs";
    out << line.dump() << '\n';
}

void emit_report(const BatchReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    emit_report(report, out);
}

} // namespace psoattack
