#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psoattack/image.hpp"

namespace psoattack {

enum class VelocityScheme {
    InertiaOnly,      // decaying inertia weight on the previous velocity
    ConstrictionOnly, // constriction factor on the whole update
    Synchronous,      // constriction applied on top of the inertia term
    Asynchronous      // inertia form early, constriction form late
};

struct VelocityWeights {
    double w_start = 0.9;
    double w_end = 0.4;
    double constriction = 1.0;
    double c1 = 2.0; // exploration: pull toward the swarm best
    double c2 = 0.5; // exploitation: pull toward the particle's own best
    VelocityScheme scheme = VelocityScheme::Synchronous;
    std::size_t t_max = 100;

    void validate() const; // throws std::invalid_argument
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    double best_fitness = 0.0;
};

struct SwarmState {
    std::vector<Particle> particles;
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::size_t iteration = 0;
    std::size_t baseline_index = 0; // particle reset to the source each iteration
};

// Linearly decreasing inertia weight; exact w_start at t=0 and w_end at t_max.
double inertia_at(std::size_t t, const VelocityWeights& weights);

// New velocity for the selected scheme. r1/r2 are the per-call uniform draws,
// injected by the caller so runs are replayable.
std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> swarm_best,
                                    const VelocityWeights& weights,
                                    std::size_t t,
                                    double r1,
                                    double r2);

// clip(clip(proposal, source-B, source+B), 0, 1), coordinate-wise.
std::vector<double> clip_to_ball_and_box(std::span<const double> proposal,
                                         std::span<const double> source,
                                         double linf_bound);

// Moves each coordinate by step_size * u[i] in the direction of sign of the
// velocity component; zero velocity leaves the coordinate alone. The result
// is clipped against the source ball and the unit box.
std::vector<double> step_position(std::span<const double> source,
                                  std::span<const double> current,
                                  std::span<const double> velocity,
                                  double step_size,
                                  double linf_bound,
                                  std::span<const double> u);

} // namespace psoattack
