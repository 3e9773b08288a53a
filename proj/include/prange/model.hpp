#pragma once

#include "prange/expr.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prange {

enum class EntityKind { Point, Line, Circle, Ellipse };

/// One geometric entity. Its scalars occupy `slot_count(kind)` consecutive
/// slots of the coordinate vector X starting at `slot`:
///   point   x y
///   line    a b c        (a x + b y + c = 0, a^2 + b^2 = 1)
///   circle  x y r
///   ellipse x y u v a b  (center, unit major-axis direction, semi-axes)
struct Entity {
    std::string id;
    EntityKind kind = EntityKind::Point;
    std::size_t slot = 0;
    std::vector<std::string> through;  // lines only: defined by two points
};

std::size_t slot_count(EntityKind kind);
const char* to_string(EntityKind kind);
std::vector<std::string> component_names(EntityKind kind);

enum class ParamKind { Distance, Angle, Radius, Diameter };

const char* to_string(ParamKind kind);
inline bool is_length(ParamKind kind) { return kind != ParamKind::Angle; }

struct Parameter {
    std::string name;
    ParamKind kind = ParamKind::Distance;
    std::optional<double> value;  // radians for angles
};

enum class ConstraintType {
    // dimensional
    Distance,
    Angle,
    Radius,
    Diameter,
    SemiMajor,
    SemiMinor,
    // structural
    Coincident,
    On,
    Parallel,
    Perpendicular,
    Tangent,
    Concentric,
    Symmetric,
    // algebraic
    Algebraic,
};

const char* to_string(ConstraintType type);
bool is_dimensional(ConstraintType type);

struct Constraint {
    ConstraintType type = ConstraintType::Coincident;
    std::vector<std::string> between;
    std::string parameter;   // dimensional
    std::string expression;  // algebraic, as written
    std::string side;        // circle-circle tangent: "internal" | "external"
    std::string axis;        // symmetric: the mirror line
    Expr algebraic;          // parsed; variables index parameters
};

/// Optional per-model overrides of solver settings.
struct SolverSection {
    std::optional<std::size_t> particles;
    std::optional<int> iterations;
    std::optional<std::uint64_t> seed;
    std::optional<double> delta;
    std::optional<double> efeas;
    std::optional<double> box_scale;
};

class ConstraintSystem {
public:
    ConstraintSystem() = default;

    // Building. Each add_* validates references and arity as it goes; call
    // finish() once everything is in to check the global invariants.
    void add_entity(std::string id, EntityKind kind, std::vector<std::string> through = {});
    void add_parameter(Parameter p);
    void add_constraint(Constraint c);
    void finish();

    const std::vector<Entity>& entities() const { return entities_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<Parameter>& parameters() const { return parameters_; }
    SolverSection& solver() { return solver_; }
    const SolverSection& solver() const { return solver_; }

    std::size_t slot_count() const { return slots_; }
    std::string slot_name(std::size_t slot) const;
    /// Entity and component index owning `slot`.
    std::pair<const Entity*, std::size_t> slot_owner(std::size_t slot) const;

    const Entity& entity(std::string_view id) const;
    bool has_entity(std::string_view id) const;
    std::size_t parameter_index(std::string_view name) const;
    bool has_parameter(std::string_view name) const;
    const Parameter& parameter(std::string_view name) const { return parameters_[parameter_index(name)]; }
    void set_value(std::string_view name, double value);

    /// Index into constraints() of the dimensional constraint defining `name`.
    std::size_t defining_constraint(std::string_view name) const;

    /// Separated form p = f(X) of a parameter's dimensional constraint, with
    /// arccos applied for angles.
    Expr parameter_function(std::size_t param) const;
    /// For angles the expression whose value is cos p; for lengths same as
    /// parameter_function().
    Expr parameter_cosine_form(std::size_t param) const;

    /// Residual equations with the given parameters substituted. Dimensional
    /// constraints of the other parameters are left out; structural,
    /// algebraic, normalization and side-condition residuals are always in.
    std::vector<Expr> residuals(const std::map<std::string, double>& fixed) const;

    /// c_i(X) for every line declared through two points.
    std::vector<Expr> singularity_terms() const;

    /// Parameter values as a name->value map (only those that have one).
    std::map<std::string, double> current_values() const;

private:
    Expr slot(const Entity& e, std::size_t component) const {
        return Expr::variable(e.slot + component);
    }
    std::vector<Expr> structural_residuals(const Constraint& c) const;
    std::vector<Expr> side_conditions(const Constraint& c) const;
    Expr dimensional_expression(const Constraint& c) const;  // cos form for angles
    void check_constraint(const Constraint& c) const;

    std::vector<Entity> entities_;
    std::vector<Constraint> constraints_;
    std::vector<Parameter> parameters_;
    std::unordered_map<std::string, std::size_t> entity_index_;
    std::unordered_map<std::string, std::size_t> parameter_index_;
    std::vector<std::size_t> defining_;  // per parameter, constraint index or npos
    std::size_t slots_ = 0;
    SolverSection solver_;
};

/// Loads the JSON model format. Throws ParseError / UnknownEntity /
/// DuplicateId / ArityMismatch / UnknownParameter.
ConstraintSystem load_system(std::string_view text);
ConstraintSystem load_system_file(const std::string& path);
std::string save_system(const ConstraintSystem& sys);

/// Structural equality of two systems: same entities, constraints and
/// parameters in the same order (values compared to 1e-12).
bool same_system(const ConstraintSystem& a, const ConstraintSystem& b);

} // namespace prange
