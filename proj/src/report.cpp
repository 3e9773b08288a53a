#include "prange/report.hpp"

#include "prange/error.hpp"
#include "prange/session.hpp"

#include <cmath>
#include <limits>

namespace prange {

using json = nlohmann::json;

namespace {

json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double read_number(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
    }
    return j.get<double>();
}

Closedness closedness(const std::string& s) { return s == "open" ? Closedness::Open : Closedness::Closed; }

Provenance provenance(const std::string& s) {
    if (s == "singular-limit") return Provenance::SingularLimit;
    if (s == "domain-bound") return Provenance::DomainBound;
    return Provenance::LagrangeStationary;
}

ErrorCode error_code(const std::string& s) {
    for (int c = 0; c <= static_cast<int>(ErrorCode::Precondition); ++c) {
        if (s == to_string(static_cast<ErrorCode>(c))) return static_cast<ErrorCode>(c);
    }
    return ErrorCode::SolveFailure;
}

ParamKind param_kind(const std::string& s) {
    if (s == "angle") return ParamKind::Angle;
    if (s == "radius") return ParamKind::Radius;
    if (s == "diameter") return ParamKind::Diameter;
    return ParamKind::Distance;
}

} // namespace

json range_to_json(const ParameterRange& r) {
    json j;
    j["parameter"] = r.parameter;
    j["kind"] = to_string(r.kind);
    j["intervals"] = json::array();
    for (const Interval& i : r.intervals) {
        j["intervals"].push_back({{"lo", i.lo.value},
                                  {"loClosed", i.lo.closed},
                                  {"hi", i.hi.infinite ? json("inf") : json(i.hi.value)},
                                  {"hiClosed", i.hi.closed}});
    }
    j["seed"] = r.provenance.seed;
    j["text"] = to_string(r);

    const RangeProvenance& p = r.provenance;
    json prov;
    prov["sampleRule"] = p.sample_rule;
    prov["probeSpan"] = p.probe_span;
    prov["gauge"] = p.gauge;
    prov["roots"] = p.roots;
    prov["continuum"] = p.continuum;
    prov["seconds"] = p.seconds;
    prov["candidates"] = json::array();
    for (const EndpointCandidate& c : p.candidates) {
        json cj{{"value", number_or_inf(c.value)},
                {"closedness", to_string(c.closedness)},
                {"provenance", to_string(c.provenance)},
                {"boxBoundary", c.box_boundary},
                {"singular", c.singular}};
        if (!c.witness.empty()) cj["witness"] = c.witness;
        prov["candidates"].push_back(std::move(cj));
    }
    prov["samples"] = json::array();
    for (const SampleRecord& s : p.samples) {
        prov["samples"].push_back(
            {{"p", s.p}, {"role", s.role}, {"solvable", s.solvable}, {"residual", number_or_inf(s.residual)}});
    }
    j["provenance"] = std::move(prov);
    return j;
}

ParameterRange range_from_json(const json& j) {
    try {
        ParameterRange r;
        r.parameter = j.at("parameter").get<std::string>();
        r.kind = param_kind(j.value("kind", std::string("distance")));
        for (const json& i : j.at("intervals")) {
            Interval iv;
            iv.lo = {read_number(i.at("lo")), i.at("loClosed").get<bool>(), false};
            const double hi = read_number(i.at("hi"));
            iv.hi = {hi, i.at("hiClosed").get<bool>(), std::isinf(hi)};
            r.intervals.push_back(iv);
        }
        r.provenance.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("provenance")) {
            const json& p = j.at("provenance");
            r.provenance.sample_rule = p.value("sampleRule", std::string("midpoint"));
            r.provenance.probe_span = p.value("probeSpan", 0.0);
            r.provenance.gauge = p.value("gauge", std::string());
            r.provenance.roots = p.value("roots", std::size_t{0});
            r.provenance.continuum = p.value("continuum", false);
            r.provenance.seconds = p.value("seconds", 0.0);
            for (const json& c : p.value("candidates", json::array())) {
                EndpointCandidate e;
                e.value = read_number(c.at("value"));
                e.infinite = std::isinf(e.value);
                e.closedness = closedness(c.at("closedness").get<std::string>());
                e.provenance = provenance(c.at("provenance").get<std::string>());
                e.box_boundary = c.value("boxBoundary", false);
                e.singular = c.value("singular", false);
                if (c.contains("witness")) e.witness = c.at("witness").get<std::vector<double>>();
                r.provenance.candidates.push_back(std::move(e));
            }
            for (const json& s : p.value("samples", json::array())) {
                r.provenance.samples.push_back({s.at("p").get<double>(), s.at("role").get<std::string>(),
                                                s.at("solvable").get<bool>(), read_number(s.at("residual"))});
            }
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

json outcome_to_json(const RangeOutcome& o) {
    if (o.ok()) return range_to_json(*o.range);
    return {{"error", to_string(o.code)}, {"detail", o.error}};
}

RangeOutcome outcome_from_json(const json& j) {
    RangeOutcome o;
    if (j.contains("error")) {
        o.code = error_code(j.at("error").get<std::string>());
        o.error = j.value("detail", std::string());
    } else {
        o.range = range_from_json(j);
    }
    return o;
}

json system_to_json(const ConstraintSystem& sys) {
    json j = json::parse(save_system(sys));
    for (json& p : j["parameters"]) {
        if (p.at("kind") == "angle" && p.contains("value")) {
            p["degrees"] = p.at("value").get<double>() * 180.0 / M_PI;
        }
    }
    return j;
}

json configuration_to_json(const ConstraintSystem& sys, const Configuration& c) {
    json j;
    j["solved"] = c.solved;
    j["residual"] = c.residual;
    j["coordinates"] = c.x;
    json entities = json::object();
    for (const Entity& e : sys.entities()) {
        json ej = json::object();
        const auto names = component_names(e.kind);
        for (std::size_t k = 0; k < names.size() && e.slot + k < c.x.size(); ++k) ej[names[k]] = c.x[e.slot + k];
        entities[e.id] = std::move(ej);
    }
    j["entities"] = std::move(entities);
    return j;
}

} // namespace prange
