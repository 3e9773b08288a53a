#pragma once

#include "prange/faure.hpp"
#include "prange/lagrange.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace prange {

struct SwarmConfig {
    std::size_t particles = 2000;
    int max_iterations = 500;
    double c1 = 1.2;
    double c2 = 1.2;
    double inertia_start = 0.7;  // linearly decreased over the run
    double inertia_end = 0.2;
    double max_velocity = 0.2;   // per-dimension clamp, fraction of the box width
    double initial_velocity = 0.1; // main-swarm start velocities, uniform in +-this fraction
    SearchBox box;

    int stagnation_window = 3;
    double variance_threshold = 1e-6;
    double merge_factor = 1.0;
    double absorb_factor = 1.0;
    double merge_floor = 1e-3;   // normalized distance below which gbests are one niche
    double settle_radius = 0.05; // only subswarms this tight take part in merging

    // guaranteed-convergence search around a subswarm's best position
    double gc_rho = 0.05;        // normalized
    int gc_success_limit = 5;
    int gc_failure_limit = 5;

    double root_tolerance = 1e-8;
    double dedupe_radius = 1e-6;   // normalized
    double value_tolerance = 1e-4; // continuum test on downstream values
    int polish_iterations = 50;

    std::uint64_t seed = 42;
    bool parallel = true;

    /// Throws ConfigError for a bad setting or a box of the wrong size.
    void validate(std::size_t dim) const;
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> pbest;
    double fitness = 0.0;
    double pbest_fitness = 0.0;
    std::vector<double> history;  // recent pbest fitness values, newest last
};

struct Subswarm {
    std::vector<Particle> members;
    std::size_t best = 0;     // index of the member holding the subswarm best
    double radius = 0.0;      // normalized
    double rho = 0.05;
    int successes = 0;
    int failures = 0;

    const std::vector<double>& gbest() const { return members[best].pbest; }
    double gbest_fitness() const { return members[best].pbest_fitness; }
};

struct Swarm {
    std::vector<Particle> main;
    std::vector<Subswarm> subswarms;
    int iteration = 0;
    std::size_t evaluations = 0;
    std::size_t subswarms_formed = 0;
    std::size_t merges = 0;
    std::mt19937_64 rng;
};

struct Root {
    std::vector<double> position;
    double fitness = 0.0;
    bool continuum = false;
    bool on_box_boundary = false;
};

struct RootSet {
    std::vector<Root> roots;
    bool continuum = false;
    std::size_t evaluations = 0;   // counted merit evaluations in the swarm phases
    std::size_t subswarms = 0;     // formed over the run
    std::size_t candidates = 0;    // subswarm bests that went to polish
};

/// Faure-distributed positions over cfg.box, small seeded random velocities,
/// fitness evaluated once.
Swarm initialize(const SwarmConfig& cfg, std::size_t dim, const MeritFunction& h);
/// Same, without evaluating (fitness left at +inf).
Swarm initialize(const SwarmConfig& cfg, std::size_t dim);

/// One cognition-only update of the main swarm followed by evaluation.
void step_main(Swarm& swarm, const MeritFunction& h, const SwarmConfig& cfg);
/// One update of every subswarm (guaranteed convergence on its best).
void step_subswarms(Swarm& swarm, const MeritFunction& h, const SwarmConfig& cfg);

/// Moves stagnated main-swarm particles, paired with their nearest
/// neighbour, into new subswarms. Returns how many were formed.
std::size_t identify_niches(Swarm& swarm, const SwarmConfig& cfg);

void merge_and_absorb(Swarm& swarm, const SwarmConfig& cfg);

/// Full run. `value` maps a root to the downstream quantity (the target
/// parameter); when given, three or more distinct roots sharing one value
/// are flagged as continuum samples.
RootSet solve(const MeritFunction& h, const SwarmConfig& cfg,
              const std::function<double(std::span<const double>)>& value = {});

double normalized_distance(std::span<const double> a, std::span<const double> b, const SearchBox& box);

} // namespace prange
