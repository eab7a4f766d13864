#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "psoattack/image.hpp"
#include "psoattack/oracle.hpp"
#include "psoattack/swarm.hpp"

namespace psoattack {

enum class AttackMode { Untargeted, Targeted };

struct AttackParams {
    double step_size = 0.05;
    double linf_bound = 0.05;      // the L-inf budget B before any doubling
    double penalty_weight = 1.0;   // c in the fitness distance penalty
    double change_rate = 0.05;     // fraction of coordinates perturbed at init/mutation
    std::size_t particles = 10;
    double mutation_prob = 0.1;
    std::size_t max_iterations = 100;
    // Stop once swarm fitness strictly exceeds this. NaN selects the
    // certificate threshold computed from the initial classification
    // (untargeted p0 - 1/C, targeted 0.5 - p0), which guarantees the label
    // criterion holds when reached.
    double fitness_stop = std::numeric_limits<double>::quiet_NaN();
    std::size_t stagnation_boost = 5; // consecutive stale iterations before doubling
    std::size_t stagnation_stop = 20; // consecutive stale iterations before giving up
    AttackMode mode = AttackMode::Untargeted;
    std::size_t target_label = 0;
    VelocityWeights velocity{};
    bool dynamic_c_weights = false; // ramp c1 up and c2 down over iterations
    std::uint64_t query_budget = 25000;

    // reduction controls; the paper caps reduction effort to bound queries
    std::size_t reduction_max_halvings = 4;
    double reduction_floor = 1e-3;
    bool enable_reduction = true;
    bool enable_step_doubling = true;

    void validate() const; // throws std::invalid_argument

    static AttackParams mnist_preset();
    static AttackParams cifar10_preset();
};

struct AttackResult {
    ImageVector adversarial;
    bool success = false;
    std::size_t original_label = 0;
    std::size_t final_label = 0;
    std::optional<std::size_t> target_label;
    QueryLedgerSnapshot queries;
    std::size_t l0 = 0;
    double l2 = 0.0;
    double linf = 0.0;
    std::size_t iterations_used = 0;
    std::uint64_t seed = 0;

    // verification extras, not part of the report line
    double pre_reduction_l2 = 0.0;
    std::uint64_t mutation_count = 0;
    std::uint64_t reduction_checks = 0;
    double effective_step = 0.0;
    double effective_linf_bound = 0.0;
    bool budget_exhausted = false;

    // SWISS only: 1 where the final adversarial differs from the source
    std::vector<std::uint8_t> saliency_mask;
};

// What counts as a win: any label but the original, or exactly the target.
struct LabelCriterion {
    AttackMode mode = AttackMode::Untargeted;
    std::size_t original_label = 0;
    std::size_t target_label = 0;

    bool satisfied(std::size_t predicted) const {
        return mode == AttackMode::Untargeted ? predicted != original_label
                                              : predicted == target_label;
    }
    bool satisfied(const OracleResponse& r) const { return satisfied(r.predicted_label); }
};

// Thrown when the victim disagrees with the expected label of the source.
struct MisclassifiedError : std::runtime_error {
    MisclassifiedError(std::size_t expected_, std::size_t predicted_)
        : std::runtime_error("source misclassified by oracle"),
          expected(expected_), predicted(predicted_) {}
    std::size_t expected;
    std::size_t predicted;
};

struct ReductionOptions {
    std::size_t max_halvings_per_coordinate = 4;
    double floor = 1e-3;          // stop halving a coordinate once its gap is below this
    // extra passes re-walk the coordinates until none accepts a halving,
    // tightening each one against the others' final values
    std::size_t max_passes = 1;
    bool verify_precondition = true;
    std::uint64_t query_budget = std::numeric_limits<std::uint64_t>::max();
};

// Signed confidence change minus the (c/d) L2 penalty. Untargeted rewards a
// drop in the original class, targeted a rise in the target class.
double attack_fitness(double baseline_confidence, double current_confidence,
                      std::span<const double> source,
                      std::span<const double> candidate,
                      double penalty_weight,
                      AttackMode mode = AttackMode::Untargeted);

// Walks the perturbed coordinates in ascending order and repeatedly moves
// each halfway back toward the source while the label criterion survives;
// the halving that loses the label is undone. One query per check.
// final_label_out, when given, receives the label observed for the returned
// vector (left untouched if no query satisfied the criterion).
std::vector<double> reduce_perturbations(std::span<const double> source,
                                         std::vector<double> best,
                                         const LabelCriterion& criterion,
                                         QueryOracle& oracle,
                                         const ReductionOptions& options,
                                         std::uint64_t* checks_out = nullptr,
                                         std::size_t* final_label_out = nullptr);

} // namespace psoattack
