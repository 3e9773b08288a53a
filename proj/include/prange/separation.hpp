#pragma once

#include "prange/expr.hpp"
#include "prange/faure.hpp"
#include "prange/model.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace prange {

/// How rigid-motion freedom is removed before solving.
///   Auto            first positional entity at the origin, second on the
///                   x axis when a feasibility probe says that is safe
///   TranslationOnly only the origin anchor
///   None            nothing pinned; the solver sees the full continuum
enum class GaugeMode { Auto, TranslationOnly, None };

const char* to_string(GaugeMode mode);

struct SeparationOptions {
    GaugeMode gauge = GaugeMode::Auto;
    double box_scale = 0.0;    // coordinate half-width override; 0 = heuristic
    std::size_t probe_starts = 32;
};

/// p = f(X) subject to G(X) = 0 for one target parameter, written over the
/// free (unpinned) coordinate slots only.
struct SeparatedFunction {
    std::string target;
    ParamKind kind = ParamKind::Distance;

    Expr f;          // arccos-wrapped for angles
    Expr cosine;     // for angles the inner expression (= cos p); else f
    std::vector<Expr> G;
    std::vector<Expr> singularity;  // c_i(X) of point-defined lines

    std::size_t full_slots = 0;
    std::vector<std::size_t> free_slots;   // reduced index -> full slot
    std::vector<double> pinned;            // full-length; value of pinned slots
    std::vector<std::string> slot_names;   // reduced
    std::vector<std::string> gauge;        // e.g. "P1.x = 0"
    GaugeMode gauge_mode = GaugeMode::None;

    SearchBox box;        // over the reduced coordinates
    double scale = 1.0;   // max(largest fixed length, 1)
    double box_half_width = 100.0;

    std::size_t m() const { return free_slots.size(); }
    std::size_t n() const { return G.size(); }

    std::vector<double> expand(std::span<const double> reduced) const;
    /// Value of the target at reduced coordinates; throws DomainError.
    double value(std::span<const double> reduced) const;
};

/// Builds the equality-constrained function of `target`. `fixed` holds every
/// fixed or already assigned parameter; `unassigned` the other variable
/// parameters, whose dimensional constraints are left out of G.
SeparatedFunction separate(const ConstraintSystem& sys, const std::string& target,
                           const std::map<std::string, double>& fixed, const std::set<std::string>& unassigned,
                           const SeparationOptions& options = {});

/// The same problem with extra equations appended to G (reduced variables).
SeparatedFunction augment(const SeparatedFunction& sf, std::vector<Expr> extra);

/// Rigid-motion reduction of a whole system (used when solving the final
/// configuration, where there is no target).
struct Reduction {
    std::vector<std::size_t> free_slots;
    std::vector<double> pinned;
    std::vector<std::string> gauge;
    GaugeMode mode = GaugeMode::None;
    SearchBox box;
    double scale = 1.0;
    double half_width = 100.0;

    std::vector<Expr> apply(const std::vector<Expr>& full) const;
    std::vector<double> expand(std::span<const double> reduced) const;
};

/// Picks the gauge pins for `sys`. The Auto probe checks that `residuals`
/// (full coordinates) stay solvable with the rotation pin in place.
Reduction reduce(const ConstraintSystem& sys, const std::vector<Expr>& residuals,
                 const std::map<std::string, double>& fixed, const SeparationOptions& options);

/// Coordinate half-width S = max(100, 10 x largest fixed length) unless
/// overridden.
double system_scale(const ConstraintSystem& sys, const std::map<std::string, double>& fixed);

} // namespace prange
