#include "prange/separation.hpp"

#include "prange/error.hpp"
#include "prange/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prange {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// Center slots (x, y) of entities that have a position.
std::vector<std::pair<std::size_t, std::string>> positional(const ConstraintSystem& sys) {
    std::vector<std::pair<std::size_t, std::string>> out;
    for (const Entity& e : sys.entities()) {
        if (e.kind != EntityKind::Line) out.emplace_back(e.slot, e.id);
    }
    return out;
}

SearchBox box_for(const ConstraintSystem& sys, const std::vector<std::size_t>& free, double half) {
    SearchBox box;
    for (std::size_t s : free) {
        auto [e, k] = sys.slot_owner(s);
        double lo = -half, hi = half;
        switch (e->kind) {
            case EntityKind::Point: break;
            case EntityKind::Line:
                if (k < 2) lo = -1.0, hi = 1.0;
                break;
            case EntityKind::Circle:
                if (k == 2) lo = 0.0;
                break;
            case EntityKind::Ellipse:
                if (k == 2 || k == 3) lo = -1.0, hi = 1.0;
                if (k >= 4) lo = 0.0;
                break;
        }
        box.lo.push_back(lo);
        box.hi.push_back(hi);
    }
    return box;
}

Reduction make_reduction(const ConstraintSystem& sys, GaugeMode mode, double half, double scale) {
    Reduction r;
    r.mode = mode;
    r.half_width = half;
    r.scale = scale;
    r.pinned.assign(sys.slot_count(), 0.0);
    std::vector<bool> pin(sys.slot_count(), false);
    const auto pos = positional(sys);
    if (mode != GaugeMode::None && !pos.empty()) {
        pin[pos[0].first] = pin[pos[0].first + 1] = true;
        r.gauge.push_back(pos[0].second + ".x = 0");
        r.gauge.push_back(pos[0].second + ".y = 0");
        if (mode == GaugeMode::Auto && pos.size() > 1) {
            pin[pos[1].first + 1] = true;
            r.gauge.push_back(pos[1].second + ".y = 0");
        }
    }
    for (std::size_t s = 0; s < sys.slot_count(); ++s) {
        if (!pin[s]) r.free_slots.push_back(s);
    }
    r.box = box_for(sys, r.free_slots, half);
    return r;
}

std::vector<std::size_t> slot_map(const std::vector<std::size_t>& free, std::size_t full) {
    std::vector<std::size_t> map(full, npos);
    for (std::size_t i = 0; i < free.size(); ++i) map[free[i]] = i;
    return map;
}

} // namespace

const char* to_string(GaugeMode mode) {
    switch (mode) {
        case GaugeMode::Auto: return "auto";
        case GaugeMode::TranslationOnly: return "translation";
        case GaugeMode::None: return "none";
    }
    return "?";
}

double system_scale(const ConstraintSystem& sys, const std::map<std::string, double>& fixed) {
    double largest = 0.0;
    for (const auto& [name, value] : fixed) {
        if (is_length(sys.parameter(name).kind)) largest = std::max(largest, value);
    }
    return std::max(largest, 1.0);
}

std::vector<Expr> Reduction::apply(const std::vector<Expr>& full) const {
    const auto map = slot_map(free_slots, pinned.size());
    std::vector<Expr> out;
    out.reserve(full.size());
    for (const Expr& e : full) out.push_back(remap_variables(e, map, pinned));
    return out;
}

std::vector<double> Reduction::expand(std::span<const double> reduced) const {
    std::vector<double> x = pinned;
    for (std::size_t i = 0; i < free_slots.size(); ++i) x[free_slots[i]] = reduced[i];
    return x;
}

Reduction reduce(const ConstraintSystem& sys, const std::vector<Expr>& residuals,
                 const std::map<std::string, double>& fixed, const SeparationOptions& options) {
    const double scale = system_scale(sys, fixed);
    const double half = options.box_scale > 0.0 ? options.box_scale : std::max(100.0, 10.0 * scale);
    Reduction r = make_reduction(sys, options.gauge, half, scale);
    if (options.gauge != GaugeMode::Auto || r.gauge.size() < 3 || residuals.empty()) return r;

    // The rotation pin is only safe if the pinned system still has a root.
    const ResidualSystem probe(r.apply(residuals), r.free_slots.size());
    MultistartOptions ms;
    ms.starts = options.probe_starts;
    const MultistartResult res = multistart_serial(probe, r.box, ms);
    if (res.success) return r;

    Reduction loose = make_reduction(sys, GaugeMode::TranslationOnly, half, scale);
    const ResidualSystem probe2(loose.apply(residuals), loose.free_slots.size());
    if (multistart_serial(probe2, loose.box, ms).success) return loose;
    return r;  // infeasible either way; keep the smaller problem
}

std::vector<double> SeparatedFunction::expand(std::span<const double> reduced) const {
    std::vector<double> x = pinned;
    for (std::size_t i = 0; i < free_slots.size(); ++i) x[free_slots[i]] = reduced[i];
    return x;
}

double SeparatedFunction::value(std::span<const double> reduced) const {
    return eval(f, reduced.subspan(0, m()));
}

SeparatedFunction separate(const ConstraintSystem& sys, const std::string& target,
                           const std::map<std::string, double>& fixed, const std::set<std::string>& unassigned,
                           const SeparationOptions& options) {
    const std::size_t ti = sys.parameter_index(target);
    if (fixed.count(target)) throw Error(ErrorCode::Precondition, target + " is both target and fixed");
    if (unassigned.count(target)) throw Error(ErrorCode::Precondition, target + " is both target and unassigned");
    for (const auto& name : unassigned) {
        sys.parameter_index(name);
        if (fixed.count(name)) throw Error(ErrorCode::Precondition, name + " is both fixed and unassigned");
    }
    if (fixed.size() + unassigned.size() + 1 != sys.parameters().size()) {
        throw Error(ErrorCode::Precondition, "every parameter must be the target, fixed or unassigned");
    }

    const Constraint& def = sys.constraints()[sys.defining_constraint(target)];
    if (!is_dimensional(def.type)) {
        throw Error(ErrorCode::SeparationError, target + " is not defined by a dimensional constraint");
    }

    const std::vector<Expr> full_g = sys.residuals(fixed);
    const Reduction red = reduce(sys, full_g, fixed, options);
    const auto map = slot_map(red.free_slots, sys.slot_count());
    auto remap = [&](const Expr& e) { return remap_variables(e, map, red.pinned); };

    SeparatedFunction sf;
    sf.target = target;
    sf.kind = sys.parameters()[ti].kind;
    sf.f = remap(sys.parameter_function(ti));
    sf.cosine = sf.kind == ParamKind::Angle ? remap(sys.parameter_cosine_form(ti)) : sf.f;
    sf.G = red.apply(full_g);
    // a pinned-out equation may fold to the constant 0; it carries nothing
    std::erase_if(sf.G, [](const Expr& g) { return g.is_constant(0.0); });
    sf.singularity = red.apply(sys.singularity_terms());
    sf.full_slots = sys.slot_count();
    sf.free_slots = red.free_slots;
    sf.pinned = red.pinned;
    for (std::size_t s : red.free_slots) sf.slot_names.push_back(sys.slot_name(s));
    sf.gauge = red.gauge;
    sf.gauge_mode = red.mode;
    sf.box = red.box;
    sf.scale = red.scale;
    sf.box_half_width = red.half_width;
    return sf;
}

SeparatedFunction augment(const SeparatedFunction& sf, std::vector<Expr> extra) {
    SeparatedFunction out = sf;
    for (Expr& e : extra) out.G.push_back(std::move(e));
    return out;
}

} // namespace prange
