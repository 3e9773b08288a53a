// prange: allowable parameter ranges for 2D constraint systems.
#include "prange/error.hpp"
#include "prange/model.hpp"
#include "prange/report.hpp"
#include "prange/service.hpp"
#include "prange/session.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace prange;
using json = nlohmann::json;

namespace {

enum Exit { Ok = 0, Usage = 1, ModelError = 2, ComputeError = 3, Rejected = 4 };

struct Options {
    std::string file;
    std::vector<std::string> positional;
    std::vector<std::string> select;
    std::vector<std::string> assign;
    std::string session_out;
    bool json = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> particles;
    std::optional<int> iters;
    std::optional<double> delta;
    std::optional<double> efeas;
    std::optional<double> box_scale;
    bool paranoid = false;
    bool no_gauge = false;
    int port = 8080;
    std::string host = "127.0.0.1";
};

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::UnknownEntity:
        case ErrorCode::DuplicateId:
        case ErrorCode::ArityMismatch:
        case ErrorCode::UnknownParameter:
        case ErrorCode::UnsupportedConstraint:
            return ModelError;
        case ErrorCode::OutOfRange:
            return Rejected;
        case ErrorCode::Precondition:
        case ErrorCode::StaleRanges:
        case ErrorCode::EmptyHistory:
        case ErrorCode::ConfigError:
            return Usage;
        default:
            return ComputeError;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
    out << text << '\n';
}

bool is_session_text(const std::string& text) {
    try {
        const json j = json::parse(text);
        return j.is_object() && j.contains("session");
    } catch (const json::exception&) {
        return false;
    }
}

// "d2=20", "alpha1=60deg", "alpha1=1.2rad"
std::pair<std::string, double> parse_assignment(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigError, "expected name=value, got '" + s + "'");
    const std::string name = s.substr(0, eq);
    std::string v = s.substr(eq + 1);
    double scale = 1.0;
    auto strip = [&](const std::string& unit, double k) {
        if (v.size() > unit.size() && v.compare(v.size() - unit.size(), unit.size(), unit) == 0) {
            v.erase(v.size() - unit.size());
            while (!v.empty() && v.back() == ' ') v.pop_back();
            scale = k;
            return true;
        }
        return false;
    };
    strip("deg", M_PI / 180.0) || strip("rad", 1.0);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw Error(ErrorCode::ConfigError, "bad value in '" + s + "'");
    return {name, x * scale};
}

std::vector<std::string> split_commas(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& s : in) {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(item);
        }
    }
    return out;
}

SessionConfig make_config(const ConstraintSystem& sys, const Options& o) {
    SessionConfig cfg = SessionConfig::from_model(sys);
    if (const char* env = std::getenv("PRANGE_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, std::string("PRANGE_SEED is not a number: ") + env);
        }
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.particles) cfg.swarm.particles = *o.particles;
    if (o.iters) cfg.swarm.max_iterations = *o.iters;
    if (o.delta) cfg.delta = *o.delta;
    if (o.efeas) cfg.feasibility.efeas = *o.efeas;
    if (o.box_scale) cfg.separation.box_scale = *o.box_scale;
    if (o.paranoid) cfg.paranoid = true;
    if (o.no_gauge) cfg.separation.gauge = GaugeMode::None;
    return cfg;
}

// Flags given on the command line win over what a session file stored.
void override_config(SessionConfig& cfg, const Options& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.particles) cfg.swarm.particles = *o.particles;
    if (o.iters) cfg.swarm.max_iterations = *o.iters;
    if (o.delta) cfg.delta = *o.delta;
    if (o.efeas) cfg.feasibility.efeas = *o.efeas;
    if (o.box_scale) cfg.separation.box_scale = *o.box_scale;
    if (o.paranoid) cfg.paranoid = true;
    if (o.no_gauge) cfg.separation.gauge = GaugeMode::None;
}

struct Context {
    std::optional<EditingSession> session;
    std::optional<ConstraintSystem> model;
    bool from_session_file = false;
};

Context open_input(const Options& o, bool need_session) {
    Context ctx;
    const std::string text = read_file(o.file);
    if (is_session_text(text)) {
        ctx.session = EditingSession::load(text);
        override_config(ctx.session->config(), o);
        ctx.from_session_file = true;
        if (!o.select.empty()) throw Error(ErrorCode::Precondition, "--select does not apply to a session file");
    } else {
        ctx.model = load_system(text);
        if (!o.select.empty()) {
            ctx.session = EditingSession::select(*ctx.model, split_commas(o.select), make_config(*ctx.model, o));
        } else if (need_session) {
            throw Error(ErrorCode::Precondition, "select variable parameters with --select (or pass a session file)");
        }
    }
    if (!o.assign.empty() && !ctx.session) throw Error(ErrorCode::Precondition, "--assign needs --select");
    for (const auto& a : split_commas(o.assign)) {
        const auto [name, value] = parse_assignment(a);
        ctx.session->ranges();
        ctx.session->assign(name, value);
    }
    return ctx;
}

void persist(const Context& ctx, const Options& o) {
    if (!ctx.session) return;
    if (!o.session_out.empty()) write_file(o.session_out, ctx.session->save());
    else if (ctx.from_session_file) write_file(o.file, ctx.session->save());
}

std::string format_value(double v, ParamKind kind) {
    std::ostringstream os;
    os.precision(8);
    os << v;
    if (kind == ParamKind::Angle) os << " rad (" << v * 180.0 / M_PI << " deg)";
    return os.str();
}

void print_state(const EditingSession& s, bool as_json) {
    if (as_json) {
        std::cout << json{{"variables", s.variables()},
                          {"assigned", s.assigned()},
                          {"unassigned", s.unassigned()},
                          {"fixed", s.fixed()},
                          {"version", s.version()}}
                         .dump(2)
                  << '\n';
        return;
    }
    std::cout << "variables:";
    for (const auto& v : s.variables()) {
        std::cout << ' ' << v;
        if (auto it = s.assigned().find(v); it != s.assigned().end()) std::cout << '=' << it->second;
    }
    std::cout << '\n';
}

int print_ranges(const RangeMap& ranges, std::uint64_t version, bool as_json) {
    bool failed = false;
    if (as_json) {
        json r = json::object();
        for (const auto& [k, o] : ranges) r[k] = outcome_to_json(o);
        std::cout << json{{"version", version}, {"ranges", r}}.dump(2) << '\n';
    }
    for (const auto& [k, o] : ranges) {
        if (!o.ok()) failed = true;
        if (as_json) continue;
        if (o.ok()) {
            std::cout << k << "  " << to_string(*o.range);
            if (o.range->kind == ParamKind::Angle) std::cout << "  (radians)";
            std::cout << '\n';
        } else {
            std::cout << k << "  error: " << o.error << '\n';
        }
    }
    return failed ? ComputeError : Ok;
}

void print_configuration(const ConstraintSystem& sys, const Configuration& c, bool as_json) {
    const json j = configuration_to_json(sys, c);
    if (as_json) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::cout << "residual " << c.residual << '\n';
    for (const auto& [id, comps] : j.at("entities").items()) {
        std::cout << id;
        for (const auto& [k, v] : comps.items()) std::cout << "  " << k << '=' << v.get<double>();
        std::cout << '\n';
    }
}

int run_verb(const std::string& verb, const Options& o) {
    if (verb == "load") {
        const ConstraintSystem sys = load_system_file(o.file);
        if (o.json) {
            std::cout << system_to_json(sys).dump(2) << '\n';
        } else {
            std::cout << sys.entities().size() << " entities, " << sys.constraints().size() << " constraints, "
                      << sys.parameters().size() << " parameters, " << sys.slot_count() << " coordinates\n";
        }
        return Ok;
    }
    if (verb == "params") {
        const ConstraintSystem sys = load_system_file(o.file);
        if (o.json) {
            std::cout << system_to_json(sys).at("parameters").dump(2) << '\n';
            return Ok;
        }
        for (const Parameter& p : sys.parameters()) {
            std::cout << p.name << "  " << to_string(p.kind) << "  "
                      << (p.value ? format_value(*p.value, p.kind) : std::string("unset")) << '\n';
        }
        return Ok;
    }
    if (verb == "select") {
        Context ctx = open_input(o, true);
        print_state(*ctx.session, o.json);
        persist(ctx, o);
        return Ok;
    }
    if (verb == "ranges") {
        Context ctx = open_input(o, true);
        const RangeMap& r = ctx.session->ranges();
        const int code = print_ranges(r, ctx.session->version(), o.json);
        persist(ctx, o);
        return code;
    }
    if (verb == "assign") {
        if (o.positional.empty()) throw Error(ErrorCode::ConfigError, "assign needs name=value");
        Context ctx = open_input(o, true);
        for (const auto& a : o.positional) {
            const auto [name, value] = parse_assignment(a);
            ctx.session->ranges();
            try {
                ctx.session->assign(name, value);
            } catch (const Error&) {
                persist(ctx, o);  // keep the ranges we paid for
                throw;
            }
        }
        print_state(*ctx.session, o.json);
        persist(ctx, o);
        return Ok;
    }
    if (verb == "undo") {
        Context ctx = open_input(o, true);
        ctx.session->undo();
        print_state(*ctx.session, o.json);
        persist(ctx, o);
        return Ok;
    }
    if (verb == "finalize") {
        Context ctx = open_input(o, true);
        const Configuration c = ctx.session->finalize();
        print_configuration(ctx.session->system(), c, o.json);
        persist(ctx, o);
        return Ok;
    }
    if (verb == "solve") {
        const ConstraintSystem sys = load_system_file(o.file);
        const SessionConfig cfg = make_config(sys, o);
        FeasibilityConfig fc = cfg.feasibility;
        fc.starts = cfg.finalize_starts;
        const Configuration c = solve_configuration(sys, sys.current_values(), fc, cfg.separation);
        print_configuration(sys, c, o.json);
        if (!c.solved) {
            std::cerr << "prange: no configuration found (best residual " << c.residual << ")\n";
            return ComputeError;
        }
        return Ok;
    }
    if (verb == "report") {
        Context ctx = open_input(o, true);
        const EditingSession& s = *ctx.session;
        json j{{"variables", s.variables()}, {"assigned", s.assigned()}, {"fixed", s.fixed()},
               {"version", s.version()},     {"seed", s.config().seed}};
        if (!s.unassigned().empty()) {
            json r = json::object();
            for (const auto& [k, out] : ctx.session->ranges()) r[k] = outcome_to_json(out);
            j["ranges"] = r;
        }
        if (s.solution()) j["solution"] = configuration_to_json(s.system(), *s.solution());
        std::cout << j.dump(2) << '\n';
        persist(ctx, o);
        return Ok;
    }
    if (verb == "serve") {
        const ConstraintSystem sys = load_system_file(o.file);
        Service service(sys, make_config(sys, o));
        const int port = service.bind(o.host, o.port);
        std::cout << "listening on http://" << o.host << ':' << port << std::endl;
        service.run();
        return Ok;
    }
    throw Error(ErrorCode::ConfigError, "unknown verb " + verb);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Allowable parameter ranges for 2D geometric constraint systems"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool session_flags, bool solver_flags) {
        sub->add_option("file", o.file, "model or session file")->required();
        sub->add_flag("--json", o.json, "machine-readable output");
        if (session_flags) {
            sub->add_option("--select", o.select, "variable parameters, e.g. d2,d3")
                ->allow_extra_args(false)
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            sub->add_option("--assign", o.assign, "assignments applied in order, e.g. d2=20")
                ->allow_extra_args(false)
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            sub->add_option("--session", o.session_out, "write the session state here");
        }
        if (solver_flags) {
            sub->add_option("--seed", o.seed, "RNG seed (default: PRANGE_SEED, then 42)");
            sub->add_option("--particles", o.particles, "swarm size");
            sub->add_option("--iters", o.iters, "swarm iterations");
            sub->add_option("--delta", o.delta, "line-collapse threshold");
            sub->add_option("--efeas", o.efeas, "feasibility tolerance on the sum of squares");
            sub->add_option("--box-scale", o.box_scale, "coordinate half-width of the search box");
            sub->add_flag("--paranoid", o.paranoid, "extra probes on unbounded intervals");
            sub->add_flag("--no-gauge", o.no_gauge, "do not pin rigid motions");
        }
    };

    common(app.add_subcommand("load", "check and summarize a model"), false, false);
    common(app.add_subcommand("params", "list parameters"), false, false);
    common(app.add_subcommand("select", "start an editing session"), true, true);
    common(app.add_subcommand("ranges", "allowable ranges of the unassigned variables"), true, true);
    auto* assign = app.add_subcommand("assign", "assign values, each checked against its range");
    common(assign, true, true);
    assign->add_option("values", o.positional, "name=value ...");
    common(app.add_subcommand("undo", "drop the last assignment"), true, true);
    common(app.add_subcommand("finalize", "solve with every parameter set"), true, true);
    common(app.add_subcommand("solve", "solve the model at its current values"), false, true);
    common(app.add_subcommand("report", "session state and range report (JSON)"), true, true);
    auto* serve = app.add_subcommand("serve", "HTTP service for one model");
    common(serve, false, true);
    serve->add_option("--port", o.port, "TCP port (0 picks one)");
    serve->add_option("--host", o.host, "bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : Usage;
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    try {
        return run_verb(verb, o);
    } catch (const Error& e) {
        std::cerr << "prange: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "prange: " << e.what() << '\n';
        return ComputeError;
    }
}
