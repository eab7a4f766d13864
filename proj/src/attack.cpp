#include "psoattack/attack.hpp"

#include <cmath>
#include <stdexcept>

namespace psoattack {

void AttackParams::validate() const {
    if (particles < 2) throw std::invalid_argument("params: need at least 2 particles");
    if (!(change_rate > 0.0) || change_rate > 1.0)
        throw std::invalid_argument("params: change_rate must be in (0,1]");
    if (!(step_size > 0.0)) throw std::invalid_argument("params: step_size must be > 0");
    if (!(linf_bound > 0.0)) throw std::invalid_argument("params: linf bound must be > 0");
    if (mutation_prob < 0.0 || mutation_prob > 1.0)
        throw std::invalid_argument("params: mutation_prob must be in [0,1]");
    if (stagnation_boost >= stagnation_stop)
        throw std::invalid_argument("params: stagnation_boost must be < stagnation_stop");
    if (max_iterations < 1) throw std::invalid_argument("params: max_iterations must be >= 1");
    if (penalty_weight < 0.0) throw std::invalid_argument("params: penalty weight must be >= 0");
    velocity.validate();
}

AttackParams AttackParams::mnist_preset() {
    AttackParams p;
    p.step_size = 0.5;
    p.linf_bound = 0.5;
    p.mutation_prob = 0.3;
    p.change_rate = 0.3;
    p.penalty_weight = 1.0;
    p.particles = 10;
    p.velocity.c1 = 2.0;
    p.velocity.c2 = 2.0;
    p.dynamic_c_weights = false;
    return p;
}

AttackParams AttackParams::cifar10_preset() {
    AttackParams p;
    p.step_size = 0.05;
    p.linf_bound = 0.05;
    p.mutation_prob = 0.1;
    p.change_rate = 0.05;
    p.penalty_weight = 1.0;
    p.particles = 10;
    p.velocity.c1 = 2.0;
    p.velocity.c2 = 0.5;
    p.dynamic_c_weights = true; // helps at higher input dimensionality
    return p;
}

double attack_fitness(double baseline_confidence, double current_confidence,
                      std::span<const double> source,
                      std::span<const double> candidate,
                      double penalty_weight,
                      AttackMode mode) {
    if (source.size() != candidate.size())
        throw std::invalid_argument("fitness: dimension mismatch");
    double gain = mode == AttackMode::Untargeted
                      ? baseline_confidence - current_confidence
                      : current_confidence - baseline_confidence;
    double sq = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
        double diff = source[i] - candidate[i];
        sq += diff * diff;
    }
    double n = static_cast<double>(source.size());
    return gain - (penalty_weight / n) * std::sqrt(sq);
}

std::vector<double> reduce_perturbations(std::span<const double> source,
                                         std::vector<double> best,
                                         const LabelCriterion& criterion,
                                         QueryOracle& oracle,
                                         const ReductionOptions& options,
                                         std::uint64_t* checks_out,
                                         std::size_t* final_label_out) {
    if (source.size() != best.size())
        throw std::invalid_argument("reduce: dimension mismatch");
    std::uint64_t checks = 0;
    auto budget_left = [&] { return oracle.total_queries() < options.query_budget; };
    auto finish = [&] {
        if (checks_out) *checks_out = checks;
        return best;
    };

    if (options.verify_precondition) {
        if (!budget_left()) return finish();
        ++checks;
        auto response = oracle.predict(best, QueryPhase::Reduction);
        if (!criterion.satisfied(response))
            throw std::invalid_argument("reduce: input does not satisfy the label criterion");
        if (final_label_out) *final_label_out = response.predicted_label;
    }

    for (std::size_t pass = 0; pass < std::max<std::size_t>(options.max_passes, 1); ++pass) {
        bool any_accepted = false;
        for (std::size_t i = 0; i < best.size(); ++i) {
            if (std::abs(best[i] - source[i]) <= 1e-9) continue; // untouched coordinate
            for (std::size_t h = 0; h < options.max_halvings_per_coordinate; ++h) {
                double gap = best[i] - source[i];
                if (std::abs(gap) <= options.floor) break;
                if (!budget_left()) return finish();
                double previous = best[i];
                best[i] += (source[i] - best[i]) * 0.5;
                ++checks;
                auto response = oracle.predict(best, QueryPhase::Reduction);
                if (!criterion.satisfied(response)) {
                    best[i] = previous; // undo the halving that lost the label
                    break;
                }
                // accepted: the working vector is exactly the queried state
                any_accepted = true;
                if (final_label_out) *final_label_out = response.predicted_label;
            }
        }
        if (!any_accepted) break; // fixed point: every survivor re-certified
    }
    return finish();
}

} // namespace psoattack
