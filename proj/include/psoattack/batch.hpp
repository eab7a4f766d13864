#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psoattack/attack.hpp"
#include "psoattack/dataset.hpp"

namespace psoattack {

enum class AttackKind { Pso, Swiss };

const char* attack_kind_name(AttackKind kind);

enum class BatchMode { Untargeted, TargetedSingle, TargetedAll };

enum class OutcomeStatus { Attacked, SkippedMisclassified, SkippedTargetIsOriginal, Errored };

struct SampleOutcome {
    std::string id;
    AttackKind attack = AttackKind::Pso;
    OutcomeStatus status = OutcomeStatus::Attacked;
    std::optional<AttackResult> result;
    std::string error;
    std::uint64_t seed = 0;
    double elapsed_ms = 0.0;
};

struct BatchAggregates {
    std::size_t samples_seen = 0;
    std::size_t skipped_misclassified = 0;
    std::size_t skipped_target_is_original = 0;
    std::size_t errored = 0;
    std::size_t attempted = 0;
    std::size_t successes = 0;
    std::optional<double> success_rate;
    std::optional<double> avg_l2;      // over successful runs
    std::optional<double> avg_l0;      // over successful runs
    std::optional<double> avg_linf;    // over successful runs
    std::optional<double> avg_queries; // over all attempted runs
    std::optional<double> median_queries;
};

struct BatchReport {
    std::vector<SampleOutcome> outcomes;
    BatchAggregates aggregates;
};

struct BatchFilters {
    // attack only the first N correctly classified samples
    std::optional<std::size_t> max_attempted;
};

struct BatchConfig {
    AttackKind attack = AttackKind::Pso;
    BatchMode mode = BatchMode::Untargeted;
    std::size_t target_label = 0; // TargetedSingle only
    std::uint64_t master_seed = 0;
    BatchFilters filters;
    std::size_t workers = 1;
};

// Replaying one sample in isolation only needs the master seed and its id.
std::uint64_t derive_sample_seed(std::uint64_t master_seed, const std::string& id,
                                 std::optional<std::size_t> target);

BatchAggregates aggregate_outcomes(const std::vector<SampleOutcome>& outcomes);

// Runs the selected attack over the dataset, skipping samples the oracle
// misclassifies; targeted-all repeats every sample over each non-true label.
// Outcomes are reported in sample order whatever the worker count.
BatchReport run_batch(const std::vector<SampleRecord>& samples, const AttackParams& params,
                      const PredictionModel& model, const BatchConfig& config);

// Line-delimited report: one record per attacked sample, aggregate last.
void emit_report(const BatchReport& report, std::ostream& out);
void emit_report(const BatchReport& report, const std::string& path);

} // namespace psoattack
