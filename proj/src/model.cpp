#include "prange/model.hpp"

#include "prange/error.hpp"

#include <cmath>
#include <limits>

namespace prange {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

Expr sq(Expr e) { return Expr::power(std::move(e), 2); }

Expr hypot2(Expr dx, Expr dy) { return sq(std::move(dx)) + sq(std::move(dy)); }

[[noreturn]] void arity(const Constraint& c, const std::string& why) {
    throw Error(ErrorCode::ArityMismatch, std::string(to_string(c.type)) + " constraint: " + why);
}

} // namespace

std::size_t slot_count(EntityKind kind) {
    switch (kind) {
        case EntityKind::Point: return 2;
        case EntityKind::Line: return 3;
        case EntityKind::Circle: return 3;
        case EntityKind::Ellipse: return 6;
    }
    return 0;
}

const char* to_string(EntityKind kind) {
    switch (kind) {
        case EntityKind::Point: return "point";
        case EntityKind::Line: return "line";
        case EntityKind::Circle: return "circle";
        case EntityKind::Ellipse: return "ellipse";
    }
    return "?";
}

std::vector<std::string> component_names(EntityKind kind) {
    switch (kind) {
        case EntityKind::Point: return {"x", "y"};
        case EntityKind::Line: return {"a", "b", "c"};
        case EntityKind::Circle: return {"x", "y", "r"};
        case EntityKind::Ellipse: return {"x", "y", "u", "v", "a", "b"};
    }
    return {};
}

const char* to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::Distance: return "distance";
        case ParamKind::Angle: return "angle";
        case ParamKind::Radius: return "radius";
        case ParamKind::Diameter: return "diameter";
    }
    return "?";
}

const char* to_string(ConstraintType type) {
    switch (type) {
        case ConstraintType::Distance: return "distance";
        case ConstraintType::Angle: return "angle";
        case ConstraintType::Radius: return "radius";
        case ConstraintType::Diameter: return "diameter";
        case ConstraintType::SemiMajor: return "semi_major";
        case ConstraintType::SemiMinor: return "semi_minor";
        case ConstraintType::Coincident: return "coincident";
        case ConstraintType::On: return "on";
        case ConstraintType::Parallel: return "parallel";
        case ConstraintType::Perpendicular: return "perpendicular";
        case ConstraintType::Tangent: return "tangent";
        case ConstraintType::Concentric: return "concentric";
        case ConstraintType::Symmetric: return "symmetric";
        case ConstraintType::Algebraic: return "algebraic";
    }
    return "?";
}

bool is_dimensional(ConstraintType type) {
    switch (type) {
        case ConstraintType::Distance:
        case ConstraintType::Angle:
        case ConstraintType::Radius:
        case ConstraintType::Diameter:
        case ConstraintType::SemiMajor:
        case ConstraintType::SemiMinor: return true;
        default: return false;
    }
}

void ConstraintSystem::add_entity(std::string id, EntityKind kind, std::vector<std::string> through) {
    if (id.empty()) throw Error(ErrorCode::ParseError, "entity without id");
    if (entity_index_.count(id)) throw Error(ErrorCode::DuplicateId, "duplicate entity id " + id);
    if (!through.empty()) {
        if (kind != EntityKind::Line) throw Error(ErrorCode::ArityMismatch, id + ": only lines take 'through'");
        if (through.size() != 2) throw Error(ErrorCode::ArityMismatch, id + ": 'through' needs two points");
        for (const auto& p : through) {
            if (!has_entity(p)) throw Error(ErrorCode::UnknownEntity, id + " passes through unknown entity " + p);
            if (entity(p).kind != EntityKind::Point) {
                throw Error(ErrorCode::ArityMismatch, id + ": 'through' entity " + p + " is not a point");
            }
        }
        if (through[0] == through[1]) throw Error(ErrorCode::ArityMismatch, id + ": 'through' points coincide");
    }
    Entity e{std::move(id), kind, slots_, std::move(through)};
    slots_ += prange::slot_count(kind);
    entity_index_.emplace(e.id, entities_.size());
    entities_.push_back(std::move(e));
}

void ConstraintSystem::add_parameter(Parameter p) {
    if (p.name.empty()) throw Error(ErrorCode::ParseError, "parameter without name");
    if (parameter_index_.count(p.name)) throw Error(ErrorCode::DuplicateId, "duplicate parameter " + p.name);
    if (p.value) {
        const double v = *p.value;
        if (!std::isfinite(v) || v < 0.0 || (p.kind == ParamKind::Angle && v > M_PI + 1e-12)) {
            throw Error(ErrorCode::ParseError, "value of " + p.name + " outside its domain");
        }
    }
    parameter_index_.emplace(p.name, parameters_.size());
    parameters_.push_back(std::move(p));
    defining_.push_back(npos);
}

void ConstraintSystem::add_constraint(Constraint c) {
    for (const auto& id : c.between) {
        if (!has_entity(id)) throw Error(ErrorCode::UnknownEntity, "unknown entity " + id);
    }
    if (!c.axis.empty() && !has_entity(c.axis)) throw Error(ErrorCode::UnknownEntity, "unknown entity " + c.axis);
    if (is_dimensional(c.type)) {
        if (!has_parameter(c.parameter)) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + c.parameter);
        const std::size_t p = parameter_index(c.parameter);
        if (defining_[p] != npos) {
            throw Error(ErrorCode::DuplicateId, "parameter " + c.parameter + " defined by two constraints");
        }
        defining_[p] = constraints_.size();
    } else if (c.type == ConstraintType::Algebraic) {
        c.algebraic = parse_expression(c.expression, [this](std::string_view name) {
            if (!has_parameter(name)) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + std::string(name));
            return parameter_index(name);
        });
    }
    check_constraint(c);
    constraints_.push_back(std::move(c));
}

void ConstraintSystem::finish() {
    for (std::size_t p = 0; p < parameters_.size(); ++p) {
        if (defining_[p] == npos) {
            throw Error(ErrorCode::UnknownParameter,
                        "parameter " + parameters_[p].name + " has no dimensional constraint");
        }
    }
}

// Resolves the entity kinds and reports arity problems before any
// expression is built.
void ConstraintSystem::check_constraint(const Constraint& c) const {
    auto kinds = [&] {
        std::vector<EntityKind> k;
        for (const auto& id : c.between) k.push_back(entity(id).kind);
        return k;
    }();
    auto need = [&](std::size_t n) {
        if (kinds.size() != n) arity(c, "expects " + std::to_string(n) + " entities, got " + std::to_string(kinds.size()));
    };
    auto is = [&](std::size_t i, EntityKind k) { return kinds[i] == k; };
    auto pair_of = [&](EntityKind a, EntityKind b) { return (is(0, a) && is(1, b)) || (is(0, b) && is(1, a)); };
    auto param_kind = [&](std::initializer_list<ParamKind> ok) {
        const ParamKind k = parameter(c.parameter).kind;
        for (ParamKind o : ok) {
            if (o == k) return;
        }
        arity(c, "parameter " + c.parameter + " has kind " + to_string(k));
    };

    switch (c.type) {
        case ConstraintType::Distance:
            need(2);
            if (!(pair_of(EntityKind::Point, EntityKind::Point) || pair_of(EntityKind::Point, EntityKind::Line) ||
                  pair_of(EntityKind::Line, EntityKind::Line))) {
                arity(c, "needs points and lines");
            }
            param_kind({ParamKind::Distance});
            break;
        case ConstraintType::Angle:
            need(2);
            if (!pair_of(EntityKind::Line, EntityKind::Line)) arity(c, "needs two lines");
            param_kind({ParamKind::Angle});
            break;
        case ConstraintType::Radius:
            need(1);
            if (!is(0, EntityKind::Circle)) arity(c, "needs a circle");
            param_kind({ParamKind::Radius});
            break;
        case ConstraintType::Diameter:
            need(1);
            if (!is(0, EntityKind::Circle)) arity(c, "needs a circle");
            param_kind({ParamKind::Diameter});
            break;
        case ConstraintType::SemiMajor:
        case ConstraintType::SemiMinor:
            need(1);
            if (!is(0, EntityKind::Ellipse)) arity(c, "needs an ellipse");
            param_kind({ParamKind::Radius, ParamKind::Distance});
            break;
        case ConstraintType::Coincident:
            need(2);
            if (!(pair_of(EntityKind::Point, EntityKind::Point) || pair_of(EntityKind::Line, EntityKind::Line))) {
                arity(c, "needs two points or two lines");
            }
            break;
        case ConstraintType::On:
            need(2);
            if (!is(0, EntityKind::Point) || is(1, EntityKind::Point)) arity(c, "needs a point then a curve");
            break;
        case ConstraintType::Parallel:
        case ConstraintType::Perpendicular:
            need(2);
            if (!pair_of(EntityKind::Line, EntityKind::Line)) arity(c, "needs two lines");
            break;
        case ConstraintType::Tangent:
            need(2);
            if (pair_of(EntityKind::Line, EntityKind::Circle)) break;
            if (pair_of(EntityKind::Circle, EntityKind::Circle)) {
                if (c.side != "internal" && c.side != "external") arity(c, "circle-circle tangency needs side internal|external");
                break;
            }
            throw Error(ErrorCode::UnsupportedConstraint, "tangent between these entity kinds is not supported");
        case ConstraintType::Concentric:
            need(2);
            for (EntityKind k : kinds) {
                if (k != EntityKind::Circle && k != EntityKind::Ellipse) arity(c, "needs circles or ellipses");
            }
            break;
        case ConstraintType::Symmetric:
            need(2);
            if (!pair_of(EntityKind::Point, EntityKind::Point)) arity(c, "needs two points");
            if (c.axis.empty() || entity(c.axis).kind != EntityKind::Line) arity(c, "needs a line as axis");
            break;
        case ConstraintType::Algebraic:
            if (!c.between.empty()) arity(c, "takes no entities");
            break;
    }
}

std::string ConstraintSystem::slot_name(std::size_t s) const {
    auto [e, k] = slot_owner(s);
    return e->id + "." + component_names(e->kind)[k];
}

std::pair<const Entity*, std::size_t> ConstraintSystem::slot_owner(std::size_t s) const {
    for (const Entity& e : entities_) {
        if (s >= e.slot && s < e.slot + prange::slot_count(e.kind)) return {&e, s - e.slot};
    }
    throw Error(ErrorCode::Precondition, "slot " + std::to_string(s) + " out of range");
}

const Entity& ConstraintSystem::entity(std::string_view id) const {
    auto it = entity_index_.find(std::string(id));
    if (it == entity_index_.end()) throw Error(ErrorCode::UnknownEntity, "unknown entity " + std::string(id));
    return entities_[it->second];
}

bool ConstraintSystem::has_entity(std::string_view id) const { return entity_index_.count(std::string(id)) > 0; }

std::size_t ConstraintSystem::parameter_index(std::string_view name) const {
    auto it = parameter_index_.find(std::string(name));
    if (it == parameter_index_.end()) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + std::string(name));
    return it->second;
}

bool ConstraintSystem::has_parameter(std::string_view name) const {
    return parameter_index_.count(std::string(name)) > 0;
}

void ConstraintSystem::set_value(std::string_view name, double value) {
    parameters_[parameter_index(name)].value = value;
}

std::size_t ConstraintSystem::defining_constraint(std::string_view name) const {
    const std::size_t c = defining_[parameter_index(name)];
    if (c == npos) throw Error(ErrorCode::UnknownParameter, "parameter " + std::string(name) + " is undefined");
    return c;
}

std::map<std::string, double> ConstraintSystem::current_values() const {
    std::map<std::string, double> out;
    for (const Parameter& p : parameters_) {
        if (p.value) out[p.name] = *p.value;
    }
    return out;
}

Expr ConstraintSystem::dimensional_expression(const Constraint& c) const {
    const Entity& e0 = entity(c.between[0]);
    switch (c.type) {
        case ConstraintType::Distance: {
            const Entity& e1 = entity(c.between[1]);
            if (e0.kind == EntityKind::Point && e1.kind == EntityKind::Point) {
                return Expr::sqrt(hypot2(slot(e0, 0) - slot(e1, 0), slot(e0, 1) - slot(e1, 1)));
            }
            if (e0.kind == EntityKind::Line && e1.kind == EntityKind::Line) {
                // parallel lines in either orientation: s = +-1 flips c2
                const Expr s = slot(e0, 0) * slot(e1, 0) + slot(e0, 1) * slot(e1, 1);
                const Expr gap = slot(e0, 2) - s * slot(e1, 2);
                return Expr::sqrt(sq(gap) / hypot2(slot(e0, 0), slot(e0, 1)));
            }
            const Entity& p = e0.kind == EntityKind::Point ? e0 : e1;
            const Entity& l = e0.kind == EntityKind::Line ? e0 : e1;
            const Expr num = slot(l, 0) * slot(p, 0) + slot(l, 1) * slot(p, 1) + slot(l, 2);
            return Expr::sqrt(sq(num) / hypot2(slot(l, 0), slot(l, 1)));
        }
        case ConstraintType::Angle: {
            const Entity& e1 = entity(c.between[1]);
            const Expr dot = slot(e0, 0) * slot(e1, 0) + slot(e0, 1) * slot(e1, 1);
            return dot / (Expr::sqrt(hypot2(slot(e0, 0), slot(e0, 1))) * Expr::sqrt(hypot2(slot(e1, 0), slot(e1, 1))));
        }
        case ConstraintType::Radius: return slot(e0, 2);
        case ConstraintType::Diameter: return Expr::constant(2.0) * slot(e0, 2);
        case ConstraintType::SemiMajor: return slot(e0, 4);
        case ConstraintType::SemiMinor: return slot(e0, 5);
        default: throw Error(ErrorCode::SeparationError, std::string(to_string(c.type)) + " has no parameter");
    }
}

Expr ConstraintSystem::parameter_cosine_form(std::size_t param) const {
    return dimensional_expression(constraints_.at(defining_.at(param)));
}

Expr ConstraintSystem::parameter_function(std::size_t param) const {
    Expr e = parameter_cosine_form(param);
    if (parameters_[param].kind == ParamKind::Angle) e = Expr::acos(e);
    return e;
}

std::vector<Expr> ConstraintSystem::side_conditions(const Constraint& c) const {
    if (c.type != ConstraintType::Distance) return {};
    const Entity& e0 = entity(c.between[0]);
    const Entity& e1 = entity(c.between[1]);
    if (e0.kind != EntityKind::Line || e1.kind != EntityKind::Line) return {};
    return {slot(e0, 0) * slot(e1, 1) - slot(e1, 0) * slot(e0, 1)};
}

std::vector<Expr> ConstraintSystem::structural_residuals(const Constraint& c) const {
    const Entity& e0 = entity(c.between.at(0));
    const Entity& e1 = c.between.size() > 1 ? entity(c.between[1]) : e0;
    switch (c.type) {
        case ConstraintType::Coincident:
            if (e0.kind == EntityKind::Point) return {slot(e0, 0) - slot(e1, 0), slot(e0, 1) - slot(e1, 1)};
            return {slot(e0, 0) * slot(e1, 1) - slot(e1, 0) * slot(e0, 1),
                    slot(e0, 2) * slot(e1, 0) - slot(e1, 2) * slot(e0, 0)};
        case ConstraintType::On:
            switch (e1.kind) {
                case EntityKind::Line:
                    return {slot(e1, 0) * slot(e0, 0) + slot(e1, 1) * slot(e0, 1) + slot(e1, 2)};
                case EntityKind::Circle:
                    return {Expr::sqrt(hypot2(slot(e0, 0) - slot(e1, 0), slot(e0, 1) - slot(e1, 1))) - slot(e1, 2)};
                case EntityKind::Ellipse: {
                    const Expr dx = slot(e0, 0) - slot(e1, 0);
                    const Expr dy = slot(e0, 1) - slot(e1, 1);
                    const Expr s = dx * slot(e1, 2) + dy * slot(e1, 3);
                    const Expr t = dy * slot(e1, 2) - dx * slot(e1, 3);
                    const Expr a2 = sq(slot(e1, 4));
                    const Expr b2 = sq(slot(e1, 5));
                    return {b2 * sq(s) + a2 * sq(t) - a2 * b2};
                }
                default: break;
            }
            break;
        case ConstraintType::Parallel: return {slot(e0, 0) * slot(e1, 1) - slot(e1, 0) * slot(e0, 1)};
        case ConstraintType::Perpendicular: return {slot(e0, 0) * slot(e1, 0) + slot(e0, 1) * slot(e1, 1)};
        case ConstraintType::Tangent: {
            if (e0.kind == EntityKind::Circle && e1.kind == EntityKind::Circle) {
                const Expr d2 = hypot2(slot(e0, 0) - slot(e1, 0), slot(e0, 1) - slot(e1, 1));
                const Expr rr = c.side == "internal" ? slot(e0, 2) - slot(e1, 2) : slot(e0, 2) + slot(e1, 2);
                return {d2 - sq(rr)};
            }
            const Entity& l = e0.kind == EntityKind::Line ? e0 : e1;
            const Entity& k = e0.kind == EntityKind::Line ? e1 : e0;
            const Expr num = slot(l, 0) * slot(k, 0) + slot(l, 1) * slot(k, 1) + slot(l, 2);
            return {slot(k, 2) - Expr::sqrt(sq(num) / hypot2(slot(l, 0), slot(l, 1)))};
        }
        case ConstraintType::Concentric: return {slot(e0, 0) - slot(e1, 0), slot(e0, 1) - slot(e1, 1)};
        case ConstraintType::Symmetric: {
            const Entity& ax = entity(c.axis);
            const Expr mx = Expr::constant(0.5) * (slot(e0, 0) + slot(e1, 0));
            const Expr my = Expr::constant(0.5) * (slot(e0, 1) + slot(e1, 1));
            return {slot(ax, 0) * mx + slot(ax, 1) * my + slot(ax, 2),
                    (slot(e1, 0) - slot(e0, 0)) * slot(ax, 1) - (slot(e1, 1) - slot(e0, 1)) * slot(ax, 0)};
        }
        default: break;
    }
    throw Error(ErrorCode::UnsupportedConstraint, std::string(to_string(c.type)) + " is not structural");
}

std::vector<Expr> ConstraintSystem::residuals(const std::map<std::string, double>& fixed) const {
    for (const auto& [name, value] : fixed) {
        if (!has_parameter(name)) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + name);
    }
    std::vector<Expr> out;

    for (const Entity& e : entities_) {
        if (e.kind == EntityKind::Line) {
            out.push_back(hypot2(slot(e, 0), slot(e, 1)) - 1.0);
            for (const auto& id : e.through) {
                const Entity& p = entity(id);
                out.push_back(slot(e, 0) * slot(p, 0) + slot(e, 1) * slot(p, 1) + slot(e, 2));
            }
        } else if (e.kind == EntityKind::Ellipse) {
            out.push_back(hypot2(slot(e, 2), slot(e, 3)) - 1.0);
        }
    }

    for (const Constraint& c : constraints_) {
        if (is_dimensional(c.type)) {
            for (Expr& s : side_conditions(c)) out.push_back(std::move(s));
            auto it = fixed.find(c.parameter);
            if (it == fixed.end()) continue;
            const Expr form = dimensional_expression(c);
            const double target = parameter(c.parameter).kind == ParamKind::Angle ? std::cos(it->second) : it->second;
            out.push_back(form - target);
        } else if (c.type == ConstraintType::Algebraic) {
            out.push_back(simplify(substitute(c.algebraic, [&](std::size_t p) {
                auto it = fixed.find(parameters_[p].name);
                if (it != fixed.end()) return Expr::constant(it->second);
                return parameter_function(p);
            })));
        } else {
            for (Expr& r : structural_residuals(c)) out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<Expr> ConstraintSystem::singularity_terms() const {
    std::vector<Expr> out;
    for (const Entity& e : entities_) {
        if (e.kind != EntityKind::Line || e.through.empty()) continue;
        const Entity& p = entity(e.through[0]);
        const Entity& q = entity(e.through[1]);
        out.push_back(hypot2(slot(p, 0) - slot(q, 0), slot(p, 1) - slot(q, 1)));
    }
    return out;
}

bool same_system(const ConstraintSystem& a, const ConstraintSystem& b) {
    if (a.entities().size() != b.entities().size() || a.constraints().size() != b.constraints().size() ||
        a.parameters().size() != b.parameters().size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entities().size(); ++i) {
        const Entity& x = a.entities()[i];
        const Entity& y = b.entities()[i];
        if (x.id != y.id || x.kind != y.kind || x.slot != y.slot || x.through != y.through) return false;
    }
    for (std::size_t i = 0; i < a.constraints().size(); ++i) {
        const Constraint& x = a.constraints()[i];
        const Constraint& y = b.constraints()[i];
        if (x.type != y.type || x.between != y.between || x.parameter != y.parameter || x.side != y.side ||
            x.axis != y.axis || !structurally_equal(x.algebraic, y.algebraic)) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.parameters().size(); ++i) {
        const Parameter& x = a.parameters()[i];
        const Parameter& y = b.parameters()[i];
        if (x.name != y.name || x.kind != y.kind || x.value.has_value() != y.value.has_value()) return false;
        if (x.value && std::abs(*x.value - *y.value) > 1e-12 * (1.0 + std::abs(*x.value))) return false;
    }
    return true;
}

} // namespace prange
