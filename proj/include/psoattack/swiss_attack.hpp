#pragma once

#include <optional>

#include "psoattack/attack.hpp"
#include "psoattack/rng.hpp"

namespace psoattack {

// Per-particle individual search spaces: consecutive chunks of the ordered
// index set, random lengths up to (|set|/P)*2, the final particle taking
// whatever remains.
struct ChunkAssignment {
    std::vector<std::vector<std::size_t>> chunks;
};

ChunkAssignment partition_search_space(const std::vector<std::size_t>& index_set,
                                       std::size_t particle_count, Rng& rng);

// 10% fewer particles, never below two.
std::size_t shrink_swarm(std::size_t particles_active);

struct ExpandOutcome {
    double fitness = 0.0;
    std::vector<double> candidate;
    OracleResponse response;
};

// Pushes every chunk coordinate to the sign-chosen extreme of the allowed
// region (the L-inf ball intersected with [0,1]); everything else stays at
// retained_positions. One query.
ExpandOutcome expand_chunk(const ImageVector& source,
                           std::span<const double> retained_positions,
                           std::span<const std::size_t> chunk,
                           double sign,
                           double linf_bound,
                           double baseline_confidence,
                           double penalty_weight,
                           AttackMode mode,
                           std::size_t focus_label,
                           QueryOracle& oracle);

// Stage 1 drops perturbed coordinates outright (revert, query, reinstate on
// label reversion: exactly one query per coordinate), stage 2 runs the
// halving reduction on the survivors.
std::vector<double> swiss_reduce(std::span<const double> source,
                                 std::vector<double> adversarial,
                                 const std::vector<std::size_t>& perturbed_indices,
                                 const LabelCriterion& criterion,
                                 QueryOracle& oracle,
                                 const ReductionOptions& options,
                                 std::uint64_t* checks_out = nullptr,
                                 std::size_t* final_label_out = nullptr);

// One SWISS run: iterative localization of the salient coordinate chunks,
// swarm shrinking when progress stalls, then the two-stage reduction.
// Change rate, step size and the L-inf bound run at 1.0 regardless of the
// configured values.
class SwissAttackRun {
public:
    SwissAttackRun(const ImageVector& source, AttackParams params, QueryOracle& oracle,
                   std::uint64_t seed);

    void classify_source(std::optional<std::size_t> expected_label = {});

    AttackResult run(std::optional<std::size_t> expected_label = {});

    std::size_t original_label() const { return criterion_.original_label; }
    const LabelCriterion& criterion() const { return criterion_; }
    bool found_adversarial() const { return found_adversarial_; }
    const std::vector<std::size_t>& retained_history() const { return retained_history_; }
    std::size_t rounds_used() const { return rounds_used_; }
    std::uint64_t reduction_checks() const { return reduction_checks_; }
    std::uint64_t expansion_queries() const { return expansion_queries_; }

private:
    struct RoundOutcome {
        bool any_adversarial = false;
        double best_fitness = 0.0;
        std::vector<std::size_t> retained_union;
        bool has_candidate = false;
        double candidate_fitness = 0.0;
        std::vector<double> candidate;
        std::size_t candidate_label = 0;
    };

    ExpandOutcome expand(std::span<const std::size_t> chunk, double sign);
    bool try_chunk(std::span<const std::size_t> chunk, RoundOutcome& outcome);
    void localize();
    bool budget_allows(std::uint64_t upcoming) const;

    ImageVector source_;
    AttackParams params_;
    QueryOracle& oracle_;
    Rng rng_;
    std::uint64_t seed_;

    bool classified_ = false;
    LabelCriterion criterion_;
    double baseline_confidence_ = 0.0;

    bool found_adversarial_ = false;
    std::vector<double> adversarial_position_;
    double adversarial_fitness_ = 0.0;
    std::size_t adversarial_label_ = 0;

    std::vector<std::size_t> retained_history_; // retained-set size per round
    std::size_t rounds_used_ = 0;
    std::uint64_t expansion_queries_ = 0;
    std::uint64_t reduction_checks_ = 0;
    bool budget_exhausted_ = false;
};

} // namespace psoattack
