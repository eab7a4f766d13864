#include "psoattack/swiss_attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psoattack/metrics.hpp"
#include "psoattack/swarm.hpp"

namespace psoattack {

ChunkAssignment partition_search_space(const std::vector<std::size_t>& index_set,
                                       std::size_t particle_count, Rng& rng) {
    if (particle_count < 2)
        throw std::invalid_argument("partition_search_space: need at least 2 particles");
    if (index_set.size() < particle_count)
        throw std::invalid_argument("partition_search_space: fewer indices than particles");

    const std::size_t n = index_set.size();
    const auto draw_bound = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) / static_cast<double>(particle_count) * 2.0));

    ChunkAssignment assignment;
    assignment.chunks.reserve(particle_count);
    std::size_t cursor = 0;
    for (std::size_t p = 0; p + 1 < particle_count; ++p) {
        std::size_t remaining = n - cursor;
        std::size_t trailing_particles = particle_count - p - 1;
        // length-1 minimum: leave at least one index for every later particle
        std::size_t cap = remaining - trailing_particles;
        std::size_t length = 1 + rng.uniform_index(std::max<std::size_t>(draw_bound, 1));
        length = std::min(length, cap);
        assignment.chunks.emplace_back(index_set.begin() + cursor,
                                       index_set.begin() + cursor + length);
        cursor += length;
    }
    // the final particle takes every remaining index
    assignment.chunks.emplace_back(index_set.begin() + cursor, index_set.end());
    return assignment;
}

std::size_t shrink_swarm(std::size_t particles_active) {
    auto shrunk = static_cast<std::size_t>(
        std::floor(static_cast<double>(particles_active) * 0.9));
    return std::max<std::size_t>(2, shrunk);
}

ExpandOutcome expand_chunk(const ImageVector& source,
                           std::span<const double> retained_positions,
                           std::span<const std::size_t> chunk,
                           double sign,
                           double linf_bound,
                           double baseline_confidence,
                           double penalty_weight,
                           AttackMode mode,
                           std::size_t focus_label,
                           QueryOracle& oracle) {
    ExpandOutcome out;
    out.candidate.assign(retained_positions.begin(), retained_positions.end());
    for (std::size_t index : chunk) {
        double s = source.data[index];
        out.candidate[index] = sign > 0.0 ? std::min(1.0, s + linf_bound)
                                          : std::max(0.0, s - linf_bound);
    }
    out.response = oracle.predict(out.candidate, QueryPhase::Optimize);
    out.fitness = attack_fitness(baseline_confidence,
                                 out.response.probabilities.at(focus_label), source.data,
                                 out.candidate, penalty_weight, mode);
    return out;
}

std::vector<double> swiss_reduce(std::span<const double> source,
                                 std::vector<double> adversarial,
                                 const std::vector<std::size_t>& perturbed_indices,
                                 const LabelCriterion& criterion,
                                 QueryOracle& oracle,
                                 const ReductionOptions& options,
                                 std::uint64_t* checks_out,
                                 std::size_t* final_label_out) {
    std::uint64_t checks = 0;
    // stage 1: drop whole coordinates, one query each
    for (std::size_t index : perturbed_indices) {
        if (oracle.total_queries() >= options.query_budget) {
            if (checks_out) *checks_out = checks;
            return adversarial;
        }
        double previous = adversarial[index];
        adversarial[index] = source[index];
        ++checks;
        auto response = oracle.predict(adversarial, QueryPhase::Reduction);
        if (!criterion.satisfied(response)) {
            adversarial[index] = previous; // the coordinate carries the label change
        } else if (final_label_out) {
            *final_label_out = response.predicted_label;
        }
    }
    // stage 2: halve what survived
    ReductionOptions halving = options;
    halving.verify_precondition = false;
    std::uint64_t halving_checks = 0;
    adversarial = reduce_perturbations(source, std::move(adversarial), criterion, oracle,
                                       halving, &halving_checks, final_label_out);
    checks += halving_checks;
    if (checks_out) *checks_out = checks;
    return adversarial;
}

SwissAttackRun::SwissAttackRun(const ImageVector& source, AttackParams params,
                               QueryOracle& oracle, std::uint64_t seed)
    : source_(source), params_(std::move(params)), oracle_(oracle), rng_(seed), seed_(seed) {
    // the published SWISS configuration: expand straight to the region boundary
    params_.change_rate = 1.0;
    params_.step_size = 1.0;
    params_.linf_bound = 1.0;
    params_.validate();
    criterion_.mode = params_.mode;
    criterion_.target_label = params_.target_label;
}

bool SwissAttackRun::budget_allows(std::uint64_t upcoming) const {
    return oracle_.total_queries() + upcoming <= params_.query_budget;
}

void SwissAttackRun::classify_source(std::optional<std::size_t> expected_label) {
    auto response = oracle_.predict(source_.data, QueryPhase::Init);
    if (expected_label && response.predicted_label != *expected_label)
        throw MisclassifiedError(*expected_label, response.predicted_label);
    criterion_.original_label = response.predicted_label;
    if (params_.mode == AttackMode::Targeted &&
        params_.target_label >= response.probabilities.size())
        throw std::invalid_argument("target label out of range");
    std::size_t focus = params_.mode == AttackMode::Untargeted ? criterion_.original_label
                                                               : criterion_.target_label;
    baseline_confidence_ = response.probabilities.at(focus);
    classified_ = true;
}

ExpandOutcome SwissAttackRun::expand(std::span<const std::size_t> chunk, double sign) {
    std::size_t focus = params_.mode == AttackMode::Untargeted ? criterion_.original_label
                                                               : criterion_.target_label;
    auto outcome = expand_chunk(source_, source_.data, chunk, sign, params_.linf_bound,
                                baseline_confidence_, params_.penalty_weight, params_.mode,
                                focus, oracle_);
    ++expansion_queries_;
    return outcome;
}

bool SwissAttackRun::try_chunk(std::span<const std::size_t> chunk, RoundOutcome& outcome) {
    double sign = rng_.coin_sign();
    ExpandOutcome attempt = expand(chunk, sign);
    outcome.best_fitness = std::max(outcome.best_fitness, attempt.fitness);
    if (!criterion_.satisfied(attempt.response) && budget_allows(1)) {
        // the opposite extreme is the other candidate direction
        ExpandOutcome opposite = expand(chunk, -sign);
        outcome.best_fitness = std::max(outcome.best_fitness, opposite.fitness);
        attempt = std::move(opposite);
    }
    if (!criterion_.satisfied(attempt.response)) return false;

    outcome.any_adversarial = true;
    outcome.retained_union.insert(outcome.retained_union.end(), chunk.begin(), chunk.end());
    if (!outcome.has_candidate || attempt.fitness > outcome.candidate_fitness) {
        outcome.has_candidate = true;
        outcome.candidate_fitness = attempt.fitness;
        outcome.candidate = std::move(attempt.candidate);
        outcome.candidate_label = attempt.response.predicted_label;
    }
    return true;
}

void SwissAttackRun::localize() {
    const std::size_t d = source_.dim();
    std::vector<std::size_t> retained(d);
    std::iota(retained.begin(), retained.end(), std::size_t{0});
    retained_history_.push_back(retained.size());

    std::size_t active = std::max<std::size_t>(2, params_.particles);
    const std::size_t round_cap =
        params_.mode == AttackMode::Targeted ? 300 : params_.max_iterations;
    double best_fitness_seen = 0.0;
    std::size_t stale_rounds = 0;
    std::size_t rounds_since_shrink = 0;

    while (rounds_used_ < round_cap) {
        if (retained.size() < 2 && found_adversarial_) break; // nothing left to split
        std::size_t effective = std::min(active, retained.size());
        if (!budget_allows(2 * std::max<std::size_t>(effective, 1))) {
            budget_exhausted_ = true;
            break;
        }

        std::vector<std::vector<std::size_t>> chunks;
        if (effective < 2)
            chunks.push_back(retained);
        else
            chunks = partition_search_space(retained, effective, rng_).chunks;

        RoundOutcome outcome;
        for (const auto& chunk : chunks) try_chunk(chunk, outcome);
        ++rounds_used_;

        bool improved = outcome.best_fitness > best_fitness_seen;
        best_fitness_seen = std::max(best_fitness_seen, outcome.best_fitness);

        if (outcome.any_adversarial) {
            adversarial_position_ = std::move(outcome.candidate);
            adversarial_fitness_ = outcome.candidate_fitness;
            adversarial_label_ = outcome.candidate_label;
            found_adversarial_ = true;
            if (outcome.retained_union.size() == retained.size()) break; // stopped shrinking
            retained = std::move(outcome.retained_union);
            retained_history_.push_back(retained.size());
        } else if (!found_adversarial_) {
            // first-round escalation: bigger chunks until two particles, then
            // the whole retained set as one corner expansion
            if (effective > 2) {
                active = shrink_swarm(effective);
                continue;
            }
            if (effective == 1) break; // single coordinate already failed both ways
            if (!budget_allows(2)) {
                budget_exhausted_ = true;
                break;
            }
            RoundOutcome corner;
            try_chunk(retained, corner);
            ++rounds_used_;
            if (corner.any_adversarial) {
                adversarial_position_ = std::move(corner.candidate);
                adversarial_fitness_ = corner.candidate_fitness;
                adversarial_label_ = corner.candidate_label;
                found_adversarial_ = true;
                continue; // retained unchanged; retry the split
            }
            break; // neither corner family flips the label
        } else {
            break; // no chunk kept the label; previous round's candidate stands
        }

        if (improved) {
            stale_rounds = 0;
            rounds_since_shrink = 0;
        } else {
            ++stale_rounds;
            ++rounds_since_shrink;
            if (rounds_since_shrink >= params_.stagnation_boost) {
                active = shrink_swarm(std::min(active, retained.size()));
                rounds_since_shrink = 0;
            }
            if (stale_rounds >= params_.stagnation_stop &&
                params_.mode == AttackMode::Untargeted)
                break;
        }
    }
}

AttackResult SwissAttackRun::run(std::optional<std::size_t> expected_label) {
    if (params_.query_budget < 1) {
        AttackResult starved;
        starved.seed = seed_;
        starved.adversarial = source_;
        starved.budget_exhausted = true;
        starved.queries = oracle_.snapshot();
        return starved;
    }
    classify_source(expected_label);

    AttackResult result;
    result.seed = seed_;
    result.original_label = criterion_.original_label;
    if (params_.mode == AttackMode::Targeted) result.target_label = params_.target_label;

    localize();

    std::vector<double> final_position;
    if (found_adversarial_) {
        result.success = true;
        result.pre_reduction_l2 = distances(source_.data, adversarial_position_).l2;
        result.final_label = adversarial_label_;
        final_position = adversarial_position_;
        if (params_.enable_reduction) {
            std::vector<std::size_t> perturbed;
            for (std::size_t i = 0; i < source_.dim(); ++i)
                if (std::abs(adversarial_position_[i] - source_.data[i]) > 1e-9)
                    perturbed.push_back(i);
            ReductionOptions options;
            options.max_halvings_per_coordinate = params_.reduction_max_halvings;
            options.floor = params_.reduction_floor;
            options.query_budget = params_.query_budget;
            std::uint64_t checks = 0;
            std::size_t label = adversarial_label_;
            final_position = swiss_reduce(source_.data, std::move(final_position), perturbed,
                                          criterion_, oracle_, options, &checks, &label);
            reduction_checks_ += checks;
            result.final_label = label;
        }
    } else {
        result.final_label = criterion_.original_label;
        final_position = source_.data;
    }

    result.adversarial = ImageVector(final_position, source_.shape);
    auto dist = distances(source_.data, result.adversarial.data);
    result.l0 = dist.l0;
    result.l2 = dist.l2;
    result.linf = dist.linf;
    result.iterations_used = rounds_used_;
    result.reduction_checks = reduction_checks_;
    result.effective_step = params_.step_size;
    result.effective_linf_bound = params_.linf_bound;
    result.budget_exhausted = budget_exhausted_;

    result.saliency_mask.assign(source_.dim(), 0);
    if (result.success)
        for (std::size_t i = 0; i < source_.dim(); ++i)
            if (std::abs(result.adversarial.data[i] - source_.data[i]) > 1e-9)
                result.saliency_mask[i] = 1;

    result.queries = oracle_.snapshot();
    return result;
}

} // namespace psoattack
