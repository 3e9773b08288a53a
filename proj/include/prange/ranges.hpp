#pragma once

#include "prange/endpoints.hpp"
#include "prange/least_squares.hpp"
#include "prange/separation.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace prange {

struct FeasibilityConfig {
    std::size_t starts = 64;
    double efeas = 1e-10;
    bool parallel = true;
    LmOptions lm;
};

struct FeasibilityVerdict {
    bool solvable = false;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<double> witness;  // full coordinates; empty if none
};

/// Is there an X with G(X) = 0 and f(X) = p? Multistart least squares on
/// sum g^2 + (f - p)^2; angle targets compare cos f with cos p.
FeasibilityVerdict check_feasible(const SeparatedFunction& sf, double p, const FeasibilityConfig& cfg);

struct RangeBound {
    double value = 0.0;
    bool closed = false;
    bool infinite = false;
};

struct Interval {
    RangeBound lo;
    RangeBound hi;

    bool contains(double v, double tol = 0.0) const;
};

struct SampleRecord {
    double p = 0.0;
    std::string role;   // "endpoint", "midpoint", "probe"
    bool solvable = false;
    double residual = 0.0;
};

struct RangeProvenance {
    std::vector<EndpointCandidate> candidates;
    std::vector<SampleRecord> samples;
    std::string sample_rule = "midpoint";
    double probe_span = 0.0;
    std::string gauge;
    std::size_t roots = 0;
    bool continuum = false;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

struct ParameterRange {
    std::string parameter;
    ParamKind kind = ParamKind::Distance;
    std::vector<Interval> intervals;
    RangeProvenance provenance;

    /// Closed ends accept values within `tol` of the endpoint.
    bool contains(double v, double tol = 1e-7) const;
    bool empty() const { return intervals.empty(); }
};

/// "[10, 30]", "[0, +inf)", "(0, +inf) U [40, 50]"; angles in radians.
std::string to_string(const ParameterRange& r);

struct ValidateConfig {
    FeasibilityConfig feasibility;
    double probe_span = 10.0;  // right-unbounded intervals are probed at lo + span
    bool paranoid = false;     // also probe at lo + 2, 4, 8 spans
};

/// Turns sorted candidates into disjoint intervals: every candidate interval
/// is tested at its midpoint (or probe), every finite endpoint on its own.
/// An endpoint is closed iff feasible and no singular limit landed on it; neighbouring
/// valid intervals merge across a closed shared endpoint.
ParameterRange validate(const std::vector<EndpointCandidate>& candidates, const SeparatedFunction& sf,
                        const ValidateConfig& cfg);

struct RangeConfig {
    EndpointConfig endpoints;
    FeasibilityConfig feasibility;
    SeparationOptions separation;
    bool paranoid = false;
    bool open_endpoints = true;
};

/// Closed candidates, open candidates, assembly and validation.
ParameterRange compute_range(const SeparatedFunction& sf, const RangeConfig& cfg);

struct Configuration {
    bool solved = false;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> x;  // full coordinates
};

/// Solves the whole system with every parameter in `values` fixed.
Configuration solve_configuration(const ConstraintSystem& sys, const std::map<std::string, double>& values,
                                  const FeasibilityConfig& cfg, const SeparationOptions& separation);

} // namespace prange
