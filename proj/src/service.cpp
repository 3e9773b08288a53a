#include "prange/service.hpp"

#include "prange/report.hpp"

#include <httplib.h>
#include <json.hpp>

#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

namespace prange {

using json = nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::Precondition:
        case ErrorCode::StaleRanges:
        case ErrorCode::EmptyHistory:
            return 409;
        case ErrorCode::OutOfRange:
        case ErrorCode::SolveFailure:
        case ErrorCode::SeparationError:
        case ErrorCode::RecursionLimit:
            return 422;
        default:
            return 400;
    }
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& e) {
    json body{{"error", to_string(e.code())}, {"detail", e.what()}};
    if (const auto* o = dynamic_cast<const OutOfRangeError*>(&e)) {
        body["parameter"] = o->parameter();
        body["value"] = o->value();
        body["range"] = range_to_json(o->range());
    }
    reply(res, http_status(e.code()), body);
}

json state_json(const EditingSession& s) {
    return {{"variables", s.variables()},   {"assigned", s.assigned()}, {"fixed", s.fixed()},
            {"unassigned", s.unassigned()}, {"history", s.history()},   {"version", s.version()},
            {"rangesCurrent", s.ranges_current()}};
}

json body_of(const httplib::Request& req) {
    try {
        return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace

struct Service::Impl {
    ConstraintSystem sys;
    SessionConfig cfg;
    httplib::Server server;

    std::mutex mu;  // guards everything below
    std::condition_variable changed;
    std::optional<EditingSession> session;
    std::uint64_t generation = 0;  // bumped by every select
    bool computing = false;
    std::size_t done = 0;
    std::size_t total = 0;
    std::thread worker;

    EditingSession& need_session() {
        if (!session) throw Error(ErrorCode::Precondition, "no variable parameters selected; POST /api/select first");
        return *session;
    }

    // caller holds the lock
    void start_worker() {
        if (worker.joinable()) worker.join();  // finished: it cleared `computing` before we got the lock
        computing = true;
        done = 0;
        total = session->unassigned().size();
        worker = std::thread([this, snapshot = *session, gen = generation]() mutable {
            RangeMap r;
            bool failed = false;
            try {
                r = snapshot.compute_ranges([this](std::size_t d, std::size_t) {
                    std::lock_guard lk(mu);
                    done = d;
                    changed.notify_all();
                });
            } catch (const Error&) {
                failed = true;
            }
            std::lock_guard lk(mu);
            if (!failed && session && gen == generation) session->install_ranges(snapshot.version(), std::move(r));
            computing = false;
            changed.notify_all();
        });
    }

    json status_json() {
        std::string st = "idle";
        if (computing) st = "computing";
        else if (session && session->ranges_current()) st = "ready";
        json j{{"status", st}, {"done", done}, {"total", total}};
        if (session) j["version"] = session->version();
        return j;
    }

    template <class F>
    void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            reply_error(res, e);
        } catch (const std::exception& e) {
            reply(res, 500, {{"error", "Internal"}, {"detail", e.what()}});
        }
    }

    void routes() {
        server.Get("/api/system", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                std::lock_guard lk(mu);
                json j = system_to_json(sys);
                if (session) j["session"] = state_json(*session);
                reply(res, 200, j);
            });
        });

        server.Post("/api/select", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = body_of(req);
                if (!body.contains("variables") || !body.at("variables").is_array()) {
                    throw Error(ErrorCode::ParseError, "expected {\"variables\": [...]}");
                }
                const auto names = body.at("variables").get<std::vector<std::string>>();
                std::lock_guard lk(mu);
                session = EditingSession::select(sys, names, cfg);
                ++generation;
                reply(res, 200, state_json(*session));
            });
        });

        server.Get("/api/ranges", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                std::unique_lock lk(mu);
                EditingSession& s = need_session();
                if (s.unassigned().empty()) throw Error(ErrorCode::Precondition, "every variable parameter is assigned");
                if (!s.ranges_current() && !computing) start_worker();
                if (req.has_param("wait")) {
                    changed.wait(lk, [&] { return !computing || !session; });
                }
                if (session && session->ranges_current()) {
                    json r = json::object();
                    for (const auto& [k, o] : session->last_ranges()) r[k] = outcome_to_json(o);
                    reply(res, 200, {{"version", session->version()}, {"ranges", r}});
                } else {
                    reply(res, 202, status_json());
                }
            });
        });

        server.Get("/api/ranges/status", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                std::lock_guard lk(mu);
                reply(res, 200, status_json());
            });
        });

        server.Post("/api/assign", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = body_of(req);
                if (!body.contains("parameter") || !body.contains("value") || !body.at("value").is_number()) {
                    throw Error(ErrorCode::ParseError, "expected {\"parameter\": name, \"value\": number}");
                }
                std::lock_guard lk(mu);
                EditingSession& s = need_session();
                s.assign(body.at("parameter").get<std::string>(), body.at("value").get<double>());
                reply(res, 200, state_json(s));
            });
        });

        server.Post("/api/undo", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                std::lock_guard lk(mu);
                EditingSession& s = need_session();
                s.undo();
                reply(res, 200, state_json(s));
            });
        });

        server.Post("/api/finalize", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                std::lock_guard lk(mu);
                EditingSession& s = need_session();
                const Configuration c = s.finalize();
                reply(res, 200, configuration_to_json(s.system(), c));
            });
        });

        server.Get("/api/solution", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                std::lock_guard lk(mu);
                EditingSession& s = need_session();
                if (!s.solution()) throw Error(ErrorCode::Precondition, "no solution yet; POST /api/finalize first");
                reply(res, 200, configuration_to_json(s.system(), *s.solution()));
            });
        });
    }
};

Service::Service(ConstraintSystem sys, SessionConfig cfg) : impl_(std::make_unique<Impl>()) {
    impl_->sys = std::move(sys);
    impl_->cfg = cfg;
    impl_->routes();
}

Service::~Service() {
    stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int Service::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::ConfigError, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

} // namespace prange
