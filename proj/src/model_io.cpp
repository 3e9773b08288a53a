#include "prange/error.hpp"
#include "prange/model.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace prange {

using json = nlohmann::json;

namespace {

EntityKind entity_kind(const std::string& s) {
    if (s == "point") return EntityKind::Point;
    if (s == "line") return EntityKind::Line;
    if (s == "circle") return EntityKind::Circle;
    if (s == "ellipse") return EntityKind::Ellipse;
    throw Error(ErrorCode::ParseError, "unknown entity type '" + s + "'");
}

ParamKind param_kind(const std::string& s) {
    if (s == "distance") return ParamKind::Distance;
    if (s == "angle") return ParamKind::Angle;
    if (s == "radius") return ParamKind::Radius;
    if (s == "diameter") return ParamKind::Diameter;
    throw Error(ErrorCode::ParseError, "unknown parameter kind '" + s + "'");
}

ConstraintType constraint_type(const std::string& s) {
    static const std::pair<const char*, ConstraintType> names[] = {
        {"distance", ConstraintType::Distance},
        {"angle", ConstraintType::Angle},
        {"radius", ConstraintType::Radius},
        {"diameter", ConstraintType::Diameter},
        {"semi_major", ConstraintType::SemiMajor},
        {"semi_minor", ConstraintType::SemiMinor},
        {"coincident", ConstraintType::Coincident},
        {"on", ConstraintType::On},
        {"point_on_line", ConstraintType::On},
        {"point_on_circle", ConstraintType::On},
        {"point_on_ellipse", ConstraintType::On},
        {"parallel", ConstraintType::Parallel},
        {"perpendicular", ConstraintType::Perpendicular},
        {"tangent", ConstraintType::Tangent},
        {"concentric", ConstraintType::Concentric},
        {"symmetric", ConstraintType::Symmetric},
        {"algebraic", ConstraintType::Algebraic},
    };
    for (const auto& [name, type] : names) {
        if (s == name) return type;
    }
    throw Error(ErrorCode::ParseError, "unknown constraint type '" + s + "'");
}

// "60 deg", "1.2 rad", "12" or a bare number
double parse_value(const json& v, ParamKind kind, const std::string& name) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw Error(ErrorCode::ParseError, "value of " + name + " must be a number or string");
    const std::string s = v.get<std::string>();
    double x = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && *begin == ' ') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, x);
    if (ec != std::errc()) throw Error(ErrorCode::ParseError, "cannot read value '" + s + "' of " + name);
    std::string unit(ptr, end);
    unit.erase(0, unit.find_first_not_of(' '));
    unit.erase(unit.find_last_not_of(' ') + 1);
    if (unit.empty() || unit == "rad") return x;
    if (unit == "deg") {
        if (kind != ParamKind::Angle) throw Error(ErrorCode::ParseError, name + ": 'deg' on a non-angle parameter");
        return x * M_PI / 180.0;
    }
    throw Error(ErrorCode::ParseError, "unknown unit '" + unit + "' in value of " + name);
}

std::vector<std::string> string_list(const json& j, const char* field) {
    if (!j.contains(field)) return {};
    const json& v = j.at(field);
    if (!v.is_array()) throw Error(ErrorCode::ParseError, std::string("'") + field + "' must be an array");
    std::vector<std::string> out;
    for (const json& s : v) out.push_back(s.get<std::string>());
    return out;
}

std::string string_field(const json& j, const char* field) {
    return j.contains(field) ? j.at(field).get<std::string>() : std::string();
}

ConstraintSystem from_json(const json& root) {
    if (!root.is_object()) throw Error(ErrorCode::ParseError, "model must be a JSON object");
    ConstraintSystem sys;
    if (root.contains("parameters")) {
        for (const json& p : root.at("parameters")) {
            Parameter par;
            par.name = p.at("name").get<std::string>();
            par.kind = param_kind(p.value("kind", std::string("distance")));
            if (p.contains("value") && !p.at("value").is_null()) par.value = parse_value(p.at("value"), par.kind, par.name);
            sys.add_parameter(std::move(par));
        }
    }
    for (const json& e : root.at("entities")) {
        sys.add_entity(e.at("id").get<std::string>(), entity_kind(e.at("type").get<std::string>()),
                       string_list(e, "through"));
    }
    if (root.contains("constraints")) {
        for (const json& c : root.at("constraints")) {
            Constraint con;
            con.type = constraint_type(c.at("type").get<std::string>());
            con.between = string_list(c, "between");
            con.parameter = string_field(c, "parameter");
            con.expression = string_field(c, "expression");
            con.side = string_field(c, "side");
            con.axis = string_field(c, "axis");
            if (is_dimensional(con.type) && con.parameter.empty()) {
                throw Error(ErrorCode::ParseError, std::string(to_string(con.type)) + " constraint needs 'parameter'");
            }
            if (con.type == ConstraintType::Algebraic && con.expression.empty()) {
                throw Error(ErrorCode::ParseError, "algebraic constraint needs 'expression'");
            }
            sys.add_constraint(std::move(con));
        }
    }
    if (root.contains("solver")) {
        const json& s = root.at("solver");
        SolverSection& out = sys.solver();
        if (s.contains("particles")) out.particles = s.at("particles").get<std::size_t>();
        if (s.contains("iterations")) out.iterations = s.at("iterations").get<int>();
        if (s.contains("seed")) out.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("delta")) out.delta = s.at("delta").get<double>();
        if (s.contains("efeas")) out.efeas = s.at("efeas").get<double>();
        if (s.contains("box_scale")) out.box_scale = s.at("box_scale").get<double>();
    }
    sys.finish();
    return sys;
}

} // namespace

ConstraintSystem load_system(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    try {
        return from_json(root);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

ConstraintSystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_system(ss.str());
}

std::string save_system(const ConstraintSystem& sys) {
    json root;
    root["entities"] = json::array();
    for (const Entity& e : sys.entities()) {
        json j{{"id", e.id}, {"type", to_string(e.kind)}};
        if (!e.through.empty()) j["through"] = e.through;
        root["entities"].push_back(std::move(j));
    }
    root["constraints"] = json::array();
    for (const Constraint& c : sys.constraints()) {
        json j{{"type", to_string(c.type)}};
        if (!c.between.empty()) j["between"] = c.between;
        if (!c.parameter.empty()) j["parameter"] = c.parameter;
        if (!c.expression.empty()) j["expression"] = c.expression;
        if (!c.side.empty()) j["side"] = c.side;
        if (!c.axis.empty()) j["axis"] = c.axis;
        root["constraints"].push_back(std::move(j));
    }
    root["parameters"] = json::array();
    for (const Parameter& p : sys.parameters()) {
        json j{{"name", p.name}, {"kind", to_string(p.kind)}};
        if (p.value) j["value"] = *p.value;
        root["parameters"].push_back(std::move(j));
    }
    const SolverSection& s = sys.solver();
    json solver = json::object();
    if (s.particles) solver["particles"] = *s.particles;
    if (s.iterations) solver["iterations"] = *s.iterations;
    if (s.seed) solver["seed"] = *s.seed;
    if (s.delta) solver["delta"] = *s.delta;
    if (s.efeas) solver["efeas"] = *s.efeas;
    if (s.box_scale) solver["box_scale"] = *s.box_scale;
    if (!solver.empty()) root["solver"] = solver;
    return root.dump(2);
}

} // namespace prange
