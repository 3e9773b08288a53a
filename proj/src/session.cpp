#include "prange/session.hpp"

#include "prange/report.hpp"

#include <algorithm>
#include <cstring>

namespace prange {

using json = nlohmann::json;

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

SessionConfig SessionConfig::from_model(const ConstraintSystem& sys) {
    SessionConfig cfg;
    const SolverSection& s = sys.solver();
    if (s.particles) cfg.swarm.particles = *s.particles;
    if (s.iterations) cfg.swarm.max_iterations = *s.iterations;
    if (s.seed) cfg.seed = *s.seed;
    if (s.delta) cfg.delta = *s.delta;
    if (s.efeas) cfg.feasibility.efeas = *s.efeas;
    if (s.box_scale) cfg.separation.box_scale = *s.box_scale;
    return cfg;
}

std::uint64_t SessionConfig::seed_for(const std::string& name, std::size_t stage) const {
    std::uint64_t h = 14695981039346656037ull;
    h = fnv1a(h, &seed, sizeof seed);
    h = fnv1a(h, name.data(), name.size());
    const std::uint64_t st = stage;
    return fnv1a(h, &st, sizeof st);
}

RangeConfig SessionConfig::range_config(const std::string& name, std::size_t stage) const {
    RangeConfig rc;
    rc.endpoints.swarm = swarm;
    rc.endpoints.swarm.seed = seed_for(name, stage);
    rc.endpoints.dedupe = dedupe;
    rc.endpoints.delta = delta;
    rc.endpoints.feasibility = feasibility.efeas;
    rc.feasibility = feasibility;
    rc.separation = separation;
    rc.paranoid = paranoid;
    return rc;
}

OutOfRangeError::OutOfRangeError(std::string parameter, double value, ParameterRange range)
    : Error(ErrorCode::OutOfRange,
            parameter + " = " + std::to_string(value) + " is outside the allowable range " + to_string(range)),
      parameter_(std::move(parameter)), value_(value), range_(std::move(range)) {}

EditingSession EditingSession::select(ConstraintSystem sys, const std::vector<std::string>& names,
                                      SessionConfig cfg) {
    if (names.empty()) throw Error(ErrorCode::Precondition, "select at least one variable parameter");
    EditingSession s;
    for (const std::string& n : names) {
        if (!sys.has_parameter(n)) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + n);
        if (!sys.parameter(n).value) throw Error(ErrorCode::Precondition, n + " has no current value");
        if (std::find(s.variables_.begin(), s.variables_.end(), n) != s.variables_.end()) {
            throw Error(ErrorCode::Precondition, n + " selected twice");
        }
        s.variables_.push_back(n);
    }
    for (const Parameter& p : sys.parameters()) {
        if (std::find(names.begin(), names.end(), p.name) != names.end()) continue;
        if (!p.value) throw Error(ErrorCode::Precondition, "fixed parameter " + p.name + " has no value");
        s.fixed_[p.name] = *p.value;
    }
    s.sys_ = std::move(sys);
    s.cfg_ = cfg;
    return s;
}

std::vector<std::string> EditingSession::unassigned() const {
    std::vector<std::string> out;
    for (const auto& v : variables_) {
        if (!assigned_.count(v)) out.push_back(v);
    }
    return out;
}

std::map<std::string, double> EditingSession::known_values() const {
    std::map<std::string, double> out = fixed_;
    for (const auto& [k, v] : assigned_) out[k] = v;
    return out;
}

SeparatedFunction EditingSession::separated(const std::string& name) const {
    std::set<std::string> others;
    for (const auto& v : unassigned()) {
        if (v != name) others.insert(v);
    }
    return separate(sys_, name, known_values(), others, cfg_.separation);
}

RangeMap EditingSession::compute_ranges(const std::function<void(std::size_t, std::size_t)>& progress) const {
    const auto todo = unassigned();
    if (todo.empty()) throw Error(ErrorCode::Precondition, "every variable parameter is assigned");
    // variables run one after another; each range is parallel inside
    RangeMap out;
    std::size_t done = 0;
    for (const std::string& v : todo) {
        RangeOutcome o;
        try {
            o.range = compute_range(separated(v), cfg_.range_config(v, assigned_.size()));
        } catch (const Error& e) {
            o.code = e.code();
            o.error = e.what();
        }
        out[v] = std::move(o);
        if (progress) progress(++done, todo.size());
    }
    return out;
}

bool EditingSession::install_ranges(std::uint64_t version, RangeMap ranges) {
    if (version != version_) return false;
    last_ranges_ = std::move(ranges);
    ranges_version_ = version_;
    return true;
}

const RangeMap& EditingSession::ranges() {
    if (!ranges_current()) install_ranges(version_, compute_ranges());
    return last_ranges_;
}

void EditingSession::assign(const std::string& name, double value) {
    if (!sys_.has_parameter(name)) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + name);
    if (std::find(variables_.begin(), variables_.end(), name) == variables_.end()) {
        throw Error(ErrorCode::Precondition, name + " is not a variable parameter of this session");
    }
    if (assigned_.count(name)) throw Error(ErrorCode::Precondition, name + " is already assigned");
    if (!ranges_current()) throw Error(ErrorCode::StaleRanges, "ranges have not been computed for the current state");
    const RangeOutcome& o = last_ranges_.at(name);
    if (!o.ok()) throw Error(ErrorCode::StaleRanges, "no range available for " + name + ": " + o.error);
    if (!o.range->contains(value)) throw OutOfRangeError(name, value, *o.range);

    // second opinion straight from the solver
    const FeasibilityVerdict v = check_feasible(separated(name), value, cfg_.feasibility);
    if (!v.solvable) throw OutOfRangeError(name, value, *o.range);

    assigned_[name] = value;
    history_.push_back(name);
    solution_.reset();
    ++version_;
}

void EditingSession::undo() {
    if (history_.empty()) throw Error(ErrorCode::EmptyHistory, "nothing to undo");
    assigned_.erase(history_.back());
    history_.pop_back();
    solution_.reset();
    ++version_;
}

Configuration EditingSession::finalize() {
    const auto todo = unassigned();
    if (!todo.empty()) {
        std::string list;
        for (const auto& v : todo) list += (list.empty() ? "" : ", ") + v;
        throw Error(ErrorCode::Precondition, "unassigned variable parameters: " + list);
    }
    FeasibilityConfig fc = cfg_.feasibility;
    fc.starts = cfg_.finalize_starts;
    Configuration c = solve_configuration(sys_, known_values(), fc, cfg_.separation);
    if (!c.solved) {
        throw Error(ErrorCode::SolveFailure,
                    "no configuration found, best residual " + std::to_string(c.residual));
    }
    solution_ = c;
    return c;
}

std::string EditingSession::save() const {
    json j;
    j["session"] = 1;
    j["model"] = json::parse(save_system(sys_));
    j["variables"] = variables_;
    j["assigned"] = assigned_;
    j["fixed"] = fixed_;
    j["history"] = history_;
    j["version"] = version_;
    j["config"] = {
        {"seed", cfg_.seed},
        {"particles", cfg_.swarm.particles},
        {"iterations", cfg_.swarm.max_iterations},
        {"delta", cfg_.delta},
        {"efeas", cfg_.feasibility.efeas},
        {"dedupe", cfg_.dedupe},
        {"paranoid", cfg_.paranoid},
        {"gauge", to_string(cfg_.separation.gauge)},
        {"box_scale", cfg_.separation.box_scale},
    };
    if (ranges_current()) {
        json r = json::object();
        for (const auto& [k, o] : last_ranges_) r[k] = outcome_to_json(o);
        j["ranges"] = r;
    }
    if (solution_) j["solution"] = configuration_to_json(sys_, *solution_);
    return j.dump(2);
}

EditingSession EditingSession::load(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (!j.contains("session")) throw Error(ErrorCode::ParseError, "not a session file");
        EditingSession s;
        s.sys_ = load_system(j.at("model").dump());
        s.variables_ = j.at("variables").get<std::vector<std::string>>();
        s.assigned_ = j.at("assigned").get<std::map<std::string, double>>();
        s.fixed_ = j.at("fixed").get<std::map<std::string, double>>();
        s.history_ = j.at("history").get<std::vector<std::string>>();
        s.version_ = j.value("version", std::uint64_t{0});
        const json& c = j.at("config");
        s.cfg_.seed = c.at("seed").get<std::uint64_t>();
        s.cfg_.swarm.particles = c.at("particles").get<std::size_t>();
        s.cfg_.swarm.max_iterations = c.at("iterations").get<int>();
        s.cfg_.delta = c.at("delta").get<double>();
        s.cfg_.feasibility.efeas = c.at("efeas").get<double>();
        s.cfg_.dedupe = c.at("dedupe").get<double>();
        s.cfg_.paranoid = c.at("paranoid").get<bool>();
        const std::string gauge = c.at("gauge").get<std::string>();
        s.cfg_.separation.gauge = gauge == "none" ? GaugeMode::None
                                  : gauge == "translation" ? GaugeMode::TranslationOnly
                                                           : GaugeMode::Auto;
        s.cfg_.separation.box_scale = c.value("box_scale", 0.0);
        for (const auto& v : s.variables_) {
            if (!s.sys_.has_parameter(v)) throw Error(ErrorCode::UnknownParameter, "unknown parameter " + v);
        }
        if (j.contains("ranges")) {
            RangeMap r;
            for (const auto& [k, o] : j.at("ranges").items()) r[k] = outcome_from_json(o);
            s.last_ranges_ = std::move(r);
            s.ranges_version_ = s.version_;
        }
        if (j.contains("solution")) {
            const json& sol = j.at("solution");
            Configuration c;
            c.solved = sol.at("solved").get<bool>();
            c.residual = sol.at("residual").get<double>();
            c.x = sol.at("coordinates").get<std::vector<double>>();
            s.solution_ = c;
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

bool same_state(const EditingSession& a, const EditingSession& b) {
    return same_system(a.system(), b.system()) && a.variables() == b.variables() &&
           a.assigned() == b.assigned() && a.fixed() == b.fixed();
}

} // namespace prange
