#pragma once

#include <optional>

#include "psoattack/attack.hpp"
#include "psoattack/rng.hpp"

namespace psoattack {

struct StagnationCounters {
    std::size_t since_boost = 0;       // resets on improvement and on doubling
    std::size_t since_improvement = 0; // resets on improvement only
};

// Advances the counters after one iteration. On stagnation_boost consecutive
// stale iterations the step size doubles and the bound doubles (bound capped
// at 1, past which the ball swallows the box). Returns true once
// stagnation_stop stale iterations accumulate.
bool adapt_on_stagnation(StagnationCounters& counters, bool improved,
                         double& step_size, double& linf_bound,
                         const AttackParams& params);

// One AdversarialPSO run against one source image: swarm initialization,
// velocity-driven search with baseline/centroid/mutation probes, and the
// halving reduction on success. Owns the run's RNG; the oracle (and its
// ledger) belongs to the caller.
class PsoAttackRun {
public:
    PsoAttackRun(const ImageVector& source, AttackParams params, QueryOracle& oracle,
                 std::uint64_t seed);

    // Classifies the clean input (phase init, one query), fixing the original
    // label, the baseline confidence, and the automatic stop threshold.
    // Throws MisclassifiedError when expected_label is given and disagrees.
    void classify_source(std::optional<std::size_t> expected_label = {});

    SwarmState initialize_swarm();
    void optimize(SwarmState& state);

    bool baseline_probe(SwarmState& state);
    bool centroid_probe(SwarmState& state);
    bool mutate_particle(SwarmState& state, std::size_t particle_index);

    std::vector<double> reduce(std::vector<double> best);

    AttackResult run(std::optional<std::size_t> expected_label = {});

    std::size_t original_label() const { return criterion_.original_label; }
    double baseline_confidence() const { return baseline_confidence_; }
    double fitness_stop() const { return fitness_stop_; }
    const LabelCriterion& criterion() const { return criterion_; }
    double effective_step() const { return effective_step_; }
    double effective_linf_bound() const { return effective_linf_bound_; }
    bool found_adversarial() const { return found_adversarial_; }
    const std::vector<double>& best_adversarial() const { return adversarial_position_; }
    std::uint64_t mutation_count() const { return mutation_count_; }
    std::uint64_t reduction_checks() const { return reduction_checks_; }
    std::size_t iterations_used() const { return iterations_used_; }
    bool budget_exhausted() const { return budget_exhausted_; }

private:
    struct Evaluation {
        OracleResponse response;
        double fitness = 0.0;
    };

    Evaluation evaluate(std::span<const double> candidate, QueryPhase phase);
    double focus_confidence(const OracleResponse& response) const;
    VelocityWeights weights_at(std::size_t t) const;
    bool budget_allows(std::uint64_t upcoming) const;
    void note_swarm_best(SwarmState& state, std::span<const double> position, double fitness,
                         std::size_t label);

    ImageVector source_;
    AttackParams params_;
    QueryOracle& oracle_;
    Rng rng_;
    std::uint64_t seed_;

    bool classified_ = false;
    LabelCriterion criterion_;
    double baseline_confidence_ = 0.0; // confidence in the focus label on the clean input
    double fitness_stop_ = 0.0;
    double effective_step_ = 0.0;
    double effective_linf_bound_ = 0.0;

    bool found_adversarial_ = false;
    std::vector<double> adversarial_position_;
    double adversarial_fitness_ = 0.0;
    std::size_t adversarial_label_ = 0;
    std::size_t reduced_label_ = 0;

    std::size_t best_label_ = 0; // label recorded with the swarm best position
    std::uint64_t mutation_count_ = 0;
    std::uint64_t reduction_checks_ = 0;
    std::size_t iterations_used_ = 0;
    bool budget_exhausted_ = false;
};

} // namespace psoattack
