#pragma once

#include "prange/nichepso.hpp"
#include "prange/separation.hpp"

#include <vector>

namespace prange {

enum class Closedness { Closed, Open };
enum class Provenance { LagrangeStationary, SingularLimit, DomainBound };

const char* to_string(Closedness c);
const char* to_string(Provenance p);

struct EndpointCandidate {
    double value = 0.0;
    Closedness closedness = Closedness::Closed;
    Provenance provenance = Provenance::LagrangeStationary;
    std::vector<double> witness;   // full coordinate vector, empty for bounds
    bool infinite = false;         // the +inf sentinel
    bool box_boundary = false;     // witness touches the search box
    bool singular = false;         // a singular limit fell in the same cluster
};

struct EndpointConfig {
    SwarmConfig swarm;             // box is filled in per problem
    double dedupe = 1e-4;          // in parameter units
    double delta = 1e-6;           // singularity threshold, squared length units
    double feasibility = 1e-10;
    std::size_t probe_starts = 64;
};

/// Stationary values of f on G = 0, one candidate per distinct value.
std::vector<EndpointCandidate> closed_candidates(const SeparatedFunction& sf, const EndpointConfig& cfg,
                                                 RootSet* roots = nullptr);

/// Limits of f as a point-defined line collapses. Each factor c_i is
/// analysed on its own at delta and delta/4 and the values extrapolated to
/// delta -> 0. `depth` counts nested singularity analyses.
std::vector<EndpointCandidate> open_candidates(const SeparatedFunction& sf, const std::vector<Expr>& terms,
                                               const EndpointConfig& cfg, int depth = 1);

/// Adds the domain bounds (0; pi for angles; +inf for lengths), sorts and
/// clusters values closer than `dedupe`. On a collision a Lagrange (closed)
/// candidate wins over an open one, and an open one over a bare domain
/// bound; a bound's exact value is kept. A cluster holding any singular
/// limit is marked `singular`.
std::vector<EndpointCandidate> assemble_candidates(const std::vector<EndpointCandidate>& closed,
                                                   const std::vector<EndpointCandidate>& open, ParamKind kind,
                                                   double dedupe);

} // namespace prange
