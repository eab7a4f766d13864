#include "psoattack/swarm.hpp"

#include <algorithm>
#include <stdexcept>

namespace psoattack {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

} // namespace

void VelocityWeights::validate() const {
    if (!(w_start >= w_end) || !(w_end >= 0.0))
        throw std::invalid_argument("VelocityWeights: need w_start >= w_end >= 0");
    if (!(constriction > 0.0))
        throw std::invalid_argument("VelocityWeights: constriction must be > 0");
    if (c1 < 0.0 || c2 < 0.0)
        throw std::invalid_argument("VelocityWeights: c1/c2 must be >= 0");
    if (t_max < 1)
        throw std::invalid_argument("VelocityWeights: t_max must be >= 1");
}

double inertia_at(std::size_t t, const VelocityWeights& weights) {
    if (t > weights.t_max)
        throw std::invalid_argument("inertia_at: t exceeds t_max; clamp before calling");
    double progress = static_cast<double>(t) / static_cast<double>(weights.t_max);
    return weights.w_end + (weights.w_start - weights.w_end) * (1.0 - progress);
}

std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> swarm_best,
                                    const VelocityWeights& weights,
                                    std::size_t t,
                                    double r1,
                                    double r2) {
    const std::size_t d = particle.position.size();
    require_same_length(d, particle.velocity.size(), "update_velocity");
    require_same_length(d, particle.best_position.size(), "update_velocity");
    require_same_length(d, swarm_best.size(), "update_velocity");

    VelocityScheme scheme = weights.scheme;
    if (scheme == VelocityScheme::Asynchronous) {
        // inertia form for the first half of the schedule, constriction after
        scheme = (t < weights.t_max / 2.0) ? VelocityScheme::InertiaOnly
                                           : VelocityScheme::ConstrictionOnly;
    }

    double inertia = 1.0;
    double damping = 1.0;
    switch (scheme) {
    case VelocityScheme::InertiaOnly:
        inertia = inertia_at(std::min(t, weights.t_max), weights);
        break;
    case VelocityScheme::ConstrictionOnly:
        damping = weights.constriction;
        break;
    case VelocityScheme::Synchronous:
        inertia = inertia_at(std::min(t, weights.t_max), weights);
        damping = weights.constriction;
        break;
    case VelocityScheme::Asynchronous:
        break; // resolved above
    }

    std::vector<double> next(d);
    for (std::size_t i = 0; i < d; ++i) {
        double exploration = weights.c1 * r1 * (swarm_best[i] - particle.position[i]);
        double exploitation = weights.c2 * r2 * (particle.best_position[i] - particle.position[i]);
        next[i] = damping * (inertia * particle.velocity[i] + exploration + exploitation);
    }
    return next;
}

std::vector<double> clip_to_ball_and_box(std::span<const double> proposal,
                                         std::span<const double> source,
                                         double linf_bound) {
    require_same_length(proposal.size(), source.size(), "clip_to_ball_and_box");
    if (!(linf_bound > 0.0))
        throw std::invalid_argument("clip_to_ball_and_box: bound must be > 0");
    std::vector<double> out(proposal.size());
    for (std::size_t i = 0; i < proposal.size(); ++i) {
        double v = std::clamp(proposal[i], source[i] - linf_bound, source[i] + linf_bound);
        out[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

std::vector<double> step_position(std::span<const double> source,
                                  std::span<const double> current,
                                  std::span<const double> velocity,
                                  double step_size,
                                  double linf_bound,
                                  std::span<const double> u) {
    const std::size_t d = source.size();
    require_same_length(d, current.size(), "step_position");
    require_same_length(d, velocity.size(), "step_position");
    require_same_length(d, u.size(), "step_position");
    if (!(step_size > 0.0))
        throw std::invalid_argument("step_position: step_size must be > 0");

    std::vector<double> proposal(d);
    for (std::size_t i = 0; i < d; ++i) {
        // velocity supplies only the direction; sign(0) means no movement
        double direction = velocity[i] > 0.0 ? 1.0 : (velocity[i] < 0.0 ? -1.0 : 0.0);
        proposal[i] = current[i] + direction * step_size * u[i];
    }
    return clip_to_ball_and_box(proposal, source, linf_bound);
}

} // namespace psoattack
