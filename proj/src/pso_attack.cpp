#include "psoattack/pso_attack.hpp"

#include <algorithm>
#include <cmath>

#include "psoattack/metrics.hpp"

namespace psoattack {

bool adapt_on_stagnation(StagnationCounters& counters, bool improved,
                         double& step_size, double& linf_bound,
                         const AttackParams& params) {
    if (improved) {
        counters.since_boost = 0;
        counters.since_improvement = 0;
        return false;
    }
    ++counters.since_boost;
    ++counters.since_improvement;
    if (counters.since_boost >= params.stagnation_boost) {
        if (params.enable_step_doubling) {
            step_size *= 2.0;
            linf_bound = std::min(1.0, linf_bound * 2.0);
        }
        counters.since_boost = 0;
    }
    return counters.since_improvement >= params.stagnation_stop;
}

PsoAttackRun::PsoAttackRun(const ImageVector& source, AttackParams params,
                           QueryOracle& oracle, std::uint64_t seed)
    : source_(source), params_(std::move(params)), oracle_(oracle), rng_(seed), seed_(seed) {
    params_.validate();
    criterion_.mode = params_.mode;
    criterion_.target_label = params_.target_label;
    effective_step_ = params_.step_size;
    effective_linf_bound_ = params_.linf_bound;
}

bool PsoAttackRun::budget_allows(std::uint64_t upcoming) const {
    return oracle_.total_queries() + upcoming <= params_.query_budget;
}

double PsoAttackRun::focus_confidence(const OracleResponse& response) const {
    std::size_t focus = params_.mode == AttackMode::Untargeted ? criterion_.original_label
                                                               : criterion_.target_label;
    return response.probabilities.at(focus);
}

void PsoAttackRun::classify_source(std::optional<std::size_t> expected_label) {
    auto response = oracle_.predict(source_.data, QueryPhase::Init);
    if (expected_label && response.predicted_label != *expected_label)
        throw MisclassifiedError(*expected_label, response.predicted_label);
    criterion_.original_label = response.predicted_label;
    if (params_.mode == AttackMode::Targeted &&
        params_.target_label >= response.probabilities.size())
        throw std::invalid_argument("target label out of range");
    baseline_confidence_ = focus_confidence(response);
    best_label_ = response.predicted_label;

    if (std::isnan(params_.fitness_stop)) {
        // certificate thresholds: past them the label criterion must hold
        double classes = static_cast<double>(response.probabilities.size());
        fitness_stop_ = params_.mode == AttackMode::Untargeted
                            ? baseline_confidence_ - 1.0 / classes
                            : 0.5 - baseline_confidence_;
    } else {
        fitness_stop_ = params_.fitness_stop;
    }
    classified_ = true;
}

PsoAttackRun::Evaluation PsoAttackRun::evaluate(std::span<const double> candidate,
                                                QueryPhase phase) {
    auto response = oracle_.predict(candidate, phase);
    double fitness = attack_fitness(baseline_confidence_, focus_confidence(response),
                                    source_.data, candidate, params_.penalty_weight,
                                    params_.mode);
    if (criterion_.satisfied(response) &&
        (!found_adversarial_ || fitness > adversarial_fitness_)) {
        found_adversarial_ = true;
        adversarial_fitness_ = fitness;
        adversarial_position_.assign(candidate.begin(), candidate.end());
        adversarial_label_ = response.predicted_label;
    }
    return {std::move(response), fitness};
}

void PsoAttackRun::note_swarm_best(SwarmState& state, std::span<const double> position,
                                   double fitness, std::size_t label) {
    state.best_fitness = fitness;
    state.best_position.assign(position.begin(), position.end());
    best_label_ = label;
}

SwarmState PsoAttackRun::initialize_swarm() {
    if (!classified_) classify_source();
    const std::size_t d = source_.dim();
    const auto subset_size =
        static_cast<std::size_t>(std::lround(static_cast<double>(d) * params_.change_rate));
    // one index subset shared by every particle; signs differ per particle
    const auto indexes = rng_.sample_indices(d, subset_size);

    SwarmState state;
    state.best_position = source_.data;
    state.best_fitness = 0.0;
    state.particles.reserve(params_.particles);

    for (std::size_t p = 0; p < params_.particles; ++p) {
        std::vector<double> position = source_.data;
        for (std::size_t index : indexes)
            position[index] += rng_.coin_sign() * effective_step_;
        position = clip_to_ball_and_box(position, source_.data, effective_linf_bound_);

        auto eval = evaluate(position, QueryPhase::Init);
        Particle particle;
        particle.velocity.assign(d, 0.0);
        particle.best_position = position;
        particle.best_fitness = eval.fitness;
        particle.position = std::move(position);
        if (particle.best_fitness > state.best_fitness)
            note_swarm_best(state, particle.best_position, particle.best_fitness,
                            eval.response.predicted_label);
        state.particles.push_back(std::move(particle));
    }
    state.baseline_index = rng_.uniform_index(params_.particles);
    return state;
}

VelocityWeights PsoAttackRun::weights_at(std::size_t t) const {
    VelocityWeights weights = params_.velocity;
    if (params_.dynamic_c_weights) {
        // exploitation starts high and hands over to exploration
        double progress = static_cast<double>(std::min(t, weights.t_max)) /
                          static_cast<double>(weights.t_max);
        double c1 = params_.velocity.c1;
        double c2 = params_.velocity.c2;
        weights.c1 = c2 + (c1 - c2) * progress;
        weights.c2 = c1 + (c2 - c1) * progress;
    }
    return weights;
}

bool PsoAttackRun::baseline_probe(SwarmState& state) {
    const std::size_t d = source_.dim();
    std::vector<double> toward_best(d);
    for (std::size_t i = 0; i < d; ++i)
        toward_best[i] = state.best_position[i] - source_.data[i];
    std::vector<double> u(d);
    for (double& v : u) v = rng_.uniform01();
    auto position = step_position(source_.data, source_.data, toward_best, effective_step_,
                                  effective_linf_bound_, u);

    auto eval = evaluate(position, QueryPhase::Baseline);
    Particle& particle = state.particles[state.baseline_index];
    particle.position = position;
    if (eval.fitness > particle.best_fitness) {
        particle.best_fitness = eval.fitness;
        particle.best_position = position;
    }
    if (eval.fitness > state.best_fitness) {
        note_swarm_best(state, position, eval.fitness, eval.response.predicted_label);
        return true;
    }
    return false;
}

bool PsoAttackRun::centroid_probe(SwarmState& state) {
    const std::size_t d = source_.dim();
    std::vector<double> mean(d, 0.0);
    for (const Particle& particle : state.particles)
        for (std::size_t i = 0; i < d; ++i) mean[i] += particle.position[i];
    for (double& v : mean) v /= static_cast<double>(state.particles.size());
    mean = clip_to_ball_and_box(mean, source_.data, effective_linf_bound_);

    auto eval = evaluate(mean, QueryPhase::Centroid);
    if (eval.fitness > state.best_fitness) {
        note_swarm_best(state, mean, eval.fitness, eval.response.predicted_label);
        return true;
    }
    return false;
}

bool PsoAttackRun::mutate_particle(SwarmState& state, std::size_t particle_index) {
    const std::size_t d = source_.dim();
    const auto subset_size =
        static_cast<std::size_t>(std::lround(static_cast<double>(d) * params_.change_rate));
    const auto indexes = rng_.sample_indices(d, subset_size);

    Particle& particle = state.particles[particle_index];
    std::vector<double> candidate = particle.position;
    for (std::size_t index : indexes)
        candidate[index] += rng_.coin_sign() * effective_step_;
    candidate = clip_to_ball_and_box(candidate, source_.data, effective_linf_bound_);

    auto eval = evaluate(candidate, QueryPhase::Mutation);
    ++mutation_count_;
    bool improved_swarm = false;
    if (eval.fitness > state.best_fitness) {
        note_swarm_best(state, candidate, eval.fitness, eval.response.predicted_label);
        improved_swarm = true;
    }
    if (eval.fitness > particle.best_fitness) {
        particle.best_fitness = eval.fitness;
        particle.best_position = candidate;
        particle.position = std::move(candidate); // adopt only on improvement
    }
    return improved_swarm;
}

void PsoAttackRun::optimize(SwarmState& state) {
    if (!classified_ || state.particles.empty())
        throw std::logic_error("optimize: swarm not initialized");
    const std::size_t iteration_cap =
        params_.mode == AttackMode::Targeted ? 300 : params_.max_iterations;
    const std::uint64_t worst_iteration_cost = 2 * params_.particles + 2;
    StagnationCounters counters;

    while (state.iteration < iteration_cap) {
        if (state.best_fitness > fitness_stop_) break;
        if (!budget_allows(worst_iteration_cost)) {
            budget_exhausted_ = true;
            break;
        }
        const double fitness_at_start = state.best_fitness;

        baseline_probe(state);

        for (std::size_t p = 0; p < state.particles.size(); ++p) {
            Particle& particle = state.particles[p];
            double r1 = rng_.uniform01();
            double r2 = rng_.uniform01();
            VelocityWeights weights = weights_at(state.iteration);
            particle.velocity =
                update_velocity(particle, state.best_position, weights,
                                std::min(state.iteration, weights.t_max), r1, r2);
            std::vector<double> u(source_.dim());
            for (double& v : u) v = rng_.uniform01();
            particle.position =
                step_position(source_.data, particle.position, particle.velocity,
                              effective_step_, effective_linf_bound_, u);

            auto eval = evaluate(particle.position, QueryPhase::Optimize);
            if (eval.fitness > particle.best_fitness) {
                particle.best_fitness = eval.fitness;
                particle.best_position = particle.position;
            }
            if (particle.best_fitness > state.best_fitness)
                note_swarm_best(state, particle.best_position, particle.best_fitness,
                                eval.response.predicted_label);
        }

        centroid_probe(state);

        for (std::size_t p = 0; p < state.particles.size(); ++p)
            if (rng_.bernoulli(params_.mutation_prob)) mutate_particle(state, p);

        ++state.iteration;
        iterations_used_ = state.iteration;
        bool improved = state.best_fitness > fitness_at_start;
        bool stop = adapt_on_stagnation(counters, improved, effective_step_,
                                        effective_linf_bound_, params_);
        // targeted search keeps going until the iteration cap
        if (stop && params_.mode == AttackMode::Untargeted) break;
    }
}

std::vector<double> PsoAttackRun::reduce(std::vector<double> best) {
    ReductionOptions options;
    options.max_halvings_per_coordinate = params_.reduction_max_halvings;
    options.floor = params_.reduction_floor;
    options.verify_precondition = true;
    options.query_budget = params_.query_budget;
    std::uint64_t checks = 0;
    std::size_t label = adversarial_label_;
    auto reduced = reduce_perturbations(source_.data, std::move(best), criterion_, oracle_,
                                        options, &checks, &label);
    reduction_checks_ += checks;
    reduced_label_ = label;
    return reduced;
}

AttackResult PsoAttackRun::run(std::optional<std::size_t> expected_label) {
    if (params_.query_budget < 1 + params_.particles) {
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

    std::vector<double> final_position;
    if (budget_allows(params_.particles)) {
        SwarmState state = initialize_swarm();
        optimize(state);
        if (found_adversarial_) {
            result.success = true;
            result.pre_reduction_l2 = distances(source_.data, adversarial_position_).l2;
            result.final_label = adversarial_label_;
            final_position = adversarial_position_;
            if (params_.enable_reduction) {
                try {
                    final_position = reduce(adversarial_position_);
                    result.final_label = reduced_label_;
                } catch (const std::invalid_argument&) {
                    final_position = adversarial_position_; // oracle drifted; keep the raw find
                    result.final_label = adversarial_label_;
                }
            }
        } else {
            result.final_label = best_label_;
            result.pre_reduction_l2 = distances(source_.data, state.best_position).l2;
            final_position = state.best_position;
        }
    } else {
        budget_exhausted_ = true;
        result.final_label = criterion_.original_label;
        final_position = source_.data;
    }

    result.adversarial = ImageVector(final_position, source_.shape);
    auto dist = distances(source_.data, result.adversarial.data);
    result.l0 = dist.l0;
    result.l2 = dist.l2;
    result.linf = dist.linf;
    result.iterations_used = iterations_used_;
    result.mutation_count = mutation_count_;
    result.reduction_checks = reduction_checks_;
    result.effective_step = effective_step_;
    result.effective_linf_bound = effective_linf_bound_;
    result.budget_exhausted = budget_exhausted_;
    result.queries = oracle_.snapshot();
    return result;
}

} // namespace psoattack
