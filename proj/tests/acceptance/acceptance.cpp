// One PASS/FAIL line per acceptance criterion. Exit status is nonzero iff a
// criterion fails.

#include "prange/endpoints.hpp"
#include "prange/lagrange.hpp"
#include "prange/nichepso.hpp"
#include "prange/ranges.hpp"
#include "prange/session.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace prange;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail, double secs) {
    std::printf("%s  %-34s %s  (%.1f s)\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    failures += !pass;
}

// Runs one criterion; an escaping exception is a failure with its message.
void criterion(const std::string& name, const std::function<bool(std::ostringstream&)>& body) {
    const auto t0 = Clock::now();
    std::ostringstream detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail << " exception: " << e.what();
    }
    report(name, pass, detail.str(), seconds_since(t0));
}

const ParameterRange* range_of(const RangeMap& m, const std::string& name) {
    const auto it = m.find(name);
    if (it == m.end() || !it->second.ok()) return nullptr;
    return &*it->second.range;
}

// [0, +inf): lower end 0 closed, unbounded above.
bool is_half_line(const ParameterRange* r) {
    if (!r || r->intervals.size() != 1) return false;
    const Interval& i = r->intervals[0];
    return i.lo.value == 0.0 && i.lo.closed && !i.lo.infinite && i.hi.infinite && !i.hi.closed;
}

// [0, pi): lower end 0 closed, upper end pi open.
bool is_open_angle(const ParameterRange* r) {
    if (!r || r->intervals.size() != 1) return false;
    const Interval& i = r->intervals[0];
    return i.lo.value == 0.0 && i.lo.closed && std::abs(i.hi.value - M_PI) < 1e-9 && !i.hi.closed;
}

std::string text(const ParameterRange* r) { return r ? to_string(*r) : std::string("<none>"); }

bool single_closed_near(const ParameterRange* r, double lo, double hi, double tol) {
    if (!r || r->intervals.size() != 1) return false;
    const Interval& i = r->intervals[0];
    return std::abs(i.lo.value - lo) <= tol && std::abs(i.hi.value - hi) <= tol && !i.hi.infinite;
}

std::vector<double> values(const std::vector<EndpointCandidate>& cs) {
    std::vector<double> v;
    for (const auto& c : cs) v.push_back(c.value);
    return v;
}

bool value_set_is(const std::vector<EndpointCandidate>& cs, const std::vector<double>& expect, double tol) {
    if (cs.size() != expect.size()) return false;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (std::abs(cs[i].value - expect[i]) > tol) return false;
    }
    return true;
}

EditingSession assigned_session(const std::string& model, const std::vector<std::string>& vars,
                                const std::vector<std::pair<std::string, double>>& assignments) {
    EditingSession s = EditingSession::select(testing::load_model(model), vars);
    for (const auto& [name, value] : assignments) {
        s.ranges();
        s.assign(name, value);
    }
    return s;
}

// Sweep d3 of a session stage with check_feasible and compare with its range.
bool sweep_agrees(EditingSession& s, const std::string& name, std::ostringstream& detail) {
    const ParameterRange* r = range_of(s.ranges(), name);
    if (!r) return false;
    double largest = 0.0;
    for (const auto& c : r->provenance.candidates) {
        if (!c.infinite) largest = std::max(largest, c.value);
    }
    const double hi = 3.0 * largest;
    const double step = 0.05;
    const SeparatedFunction sf = s.separated(name);
    FeasibilityConfig fc = s.config().feasibility;
    const auto found = testing::sweep([&](double p) { return check_feasible(sf, p, fc).solvable; }, hi, step);
    const bool ok = testing::sweep_matches(found, *r, hi, step);
    detail << " " << name << "=" << to_string(*r) << " sweep";
    for (const auto& i : found) detail << " [" << i.lo << "," << i.hi << "]";
    return ok;
}

// Picks a value uniformly inside a range; unbounded intervals are cut at the
// probe span past their lower end.
double pick_inside(const ParameterRange& r, std::mt19937_64& rng) {
    std::vector<double> lengths;
    for (const auto& i : r.intervals) {
        const double hi = i.hi.infinite ? i.lo.value + r.provenance.probe_span : i.hi.value;
        lengths.push_back(std::max(hi - i.lo.value, 0.0));
    }
    std::discrete_distribution<std::size_t> which(lengths.begin(), lengths.end());
    const std::size_t k = which(rng);
    const Interval& i = r.intervals[k];
    std::uniform_real_distribution<double> U(i.lo.value, i.lo.value + lengths[k]);
    return U(rng);
}

struct WalkTally {
    int ok = 0;
    double worst = 0.0;
    std::string first_failure;
};

void random_walks(const std::string& model, const std::vector<std::string>& vars, int walks, WalkTally& t) {
    for (int w = 0; w < walks; ++w) {
        std::mt19937_64 rng(1000 + w);
        EditingSession s = EditingSession::select(testing::load_model(model), vars);
        s.config().seed = 1000 + w;
        std::ostringstream trail;
        try {
            while (!s.unassigned().empty()) {
                const auto left = s.unassigned();
                const std::string name = left[rng() % left.size()];
                const ParameterRange* r = range_of(s.ranges(), name);
                if (!r || r->empty()) throw std::runtime_error("no range for " + name);
                const double v = pick_inside(*r, rng);
                trail << name << "=" << v << " ";
                s.assign(name, v);
            }
            const Configuration c = s.finalize();
            t.worst = std::max(t.worst, c.residual);
            if (c.solved && c.residual < 1e-10) {
                ++t.ok;
                continue;
            }
            trail << "residual " << c.residual;
        } catch (const std::exception& e) {
            trail << e.what();
        }
        if (t.first_failure.empty()) t.first_failure = model + " walk " + std::to_string(w) + ": " + trail.str();
    }
}

} // namespace

int main() {
    std::printf("acceptance suite\n");

    // Triangle stages share one session.
    EditingSession tri = EditingSession::select(testing::load_model("triangle.json"), {"d2", "d3"});

    criterion("triangle stage 1", [&](std::ostringstream& d) {
        const SessionConfig& c = tri.config();
        const auto t0 = Clock::now();
        const RangeMap& m = tri.ranges();
        const double secs = seconds_since(t0);
        const ParameterRange* d2 = range_of(m, "d2");
        const ParameterRange* d3 = range_of(m, "d3");
        d << "d2=" << text(d2) << " d3=" << text(d3) << " " << c.swarm.particles << "x" << c.swarm.max_iterations
          << " seed " << c.seed << " in " << secs << " s";
        return is_half_line(d2) && is_half_line(d3) && secs < 60.0 && c.swarm.particles == 2000 &&
               c.swarm.max_iterations == 500;
    });

    criterion("triangle stage 2", [&](std::ostringstream& d) {
        tri.assign("d2", 20.0);
        const ParameterRange* d3 = range_of(tri.ranges(), "d3");
        d << "d3=" << text(d3);
        if (!single_closed_near(d3, 10.0, 30.0, 1e-3)) return false;
        const Interval& i = d3->intervals[0];
        d << " lo " << i.lo.value << " hi " << i.hi.value;
        return i.lo.closed && i.hi.closed;
    });

    // Case 1: d1 then d3 on the right-angle quadrangle.
    EditingSession case1_10 = EditingSession::select(testing::load_model("quadrangle.json"), {"d1", "d3"});
    EditingSession case1_30 = case1_10;

    criterion("case 1 reproduction", [&](std::ostringstream& d) {
        const ParameterRange* d1 = range_of(case1_10.ranges(), "d1");
        d << "d1=" << text(d1);
        bool ok = is_half_line(d1);
        case1_30.install_ranges(case1_30.version(), case1_10.last_ranges());
        case1_10.assign("d1", 10.0);
        case1_30.assign("d1", 30.0);
        struct Row {
            EditingSession* s;
            double d1, lo, hi;
        };
        for (const Row& row : {Row{&case1_10, 10.0, 4.14, 24.14}, Row{&case1_30, 30.0, 21.62, 41.62}}) {
            const ParameterRange* d3 = range_of(row.s->ranges(), "d3");
            const double r = std::sqrt(row.d1 * row.d1 + 100.0);
            d << " | d1=" << row.d1 << ": d3=" << text(d3);
            ok = ok && single_closed_near(d3, row.lo, row.hi, 0.05) && single_closed_near(d3, r - 10.0, r + 10.0, 1e-3);
        }
        return ok;
    });

    criterion("case 1 completeness", [&](std::ostringstream& d) {
        case1_30.ranges();
        case1_30.assign("d3", 25.0);
        const Configuration c = case1_30.finalize();
        d << "d1=30, d3=25 accepted; finalize residual " << c.residual;
        return c.solved && c.residual < 1e-10;
    });

    criterion("closed-endpoint recovery", [&](std::ostringstream& d) {
        const ConstraintSystem sys = testing::load_model("triangle.json");
        const std::map<std::string, double> fixed{{"d1", 10.0}, {"d2", 20.0}};
        int gauged = 0, free = 0;
        std::string miss;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            EndpointConfig ec = SessionConfig{}.range_config("d3", 1).endpoints;
            ec.swarm.seed = seed;
            const SeparatedFunction a = separate(sys, "d3", fixed, {});
            const auto ca = closed_candidates(a, ec);
            if (value_set_is(ca, {10.0, 30.0}, 1e-3)) {
                ++gauged;
            } else if (miss.empty()) {
                miss = " auto seed " + std::to_string(seed) + " " + testing::to_text(values(ca));
            }

            SeparationOptions none;
            none.gauge = GaugeMode::None;
            const SeparatedFunction b = separate(sys, "d3", fixed, {}, none);
            RootSet roots;
            const auto cb = closed_candidates(b, ec, &roots);
            if (value_set_is(cb, {10.0, 30.0}, 1e-3) && roots.continuum) {
                ++free;
            } else if (miss.empty()) {
                miss = " ungauged seed " + std::to_string(seed) + " " + testing::to_text(values(cb)) +
                       (roots.continuum ? " continuum" : " no continuum flag");
            }
        }
        d << "auto gauge " << gauged << "/20, no gauge with continuum " << free << "/20" << miss;
        return gauged >= 19 && free >= 19;
    });

    criterion("brute-force sweep", [&](std::ostringstream& d) {
        EditingSession t = assigned_session("triangle.json", {"d2", "d3"}, {{"d2", 20.0}});
        EditingSession q10 = assigned_session("quadrangle.json", {"d1", "d3"}, {{"d1", 10.0}});
        EditingSession q30 = assigned_session("quadrangle.json", {"d1", "d3"}, {{"d1", 30.0}});
        d << "triangle";
        bool ok = sweep_agrees(t, "d3", d);
        d << " | case 1, d1=10";
        ok = sweep_agrees(q10, "d3", d) && ok;
        d << " | case 1, d1=30";
        ok = sweep_agrees(q30, "d3", d) && ok;
        return ok;
    });

    criterion("gradient suite", [&](std::ostringstream& d) {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> in(0.5, 2.0);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const std::size_t m = 2 + rng() % 3;
            const std::size_t n = 1 + rng() % m;
            const Expr f = testing::random_tree(rng, m, 3);
            std::vector<Expr> G;
            for (std::size_t i = 0; i < n; ++i) G.push_back(testing::random_tree(rng, m, 3));
            const LagrangeSystem ls = build_lagrange(f, G, m);
            std::vector<double> p(m + n);
            for (double& x : p) x = in(rng);
            auto L = [&](std::span<const double> q) { return eval(ls.L, q); };
            for (std::size_t j = 0; j < m + n; ++j) {
                const double fd = testing::central_difference(L, p, j);
                worst = std::max(worst, testing::relative_error(eval(ls.equations[j], p), fd));
            }
        }
        d << "20 systems, worst relative error " << worst;
        return worst < 1e-6;
    });

    criterion("multimodal suite", [&](std::ostringstream& d) {
        const Expr x = Expr::variable(0), y = Expr::variable(1);
        struct Problem {
            std::string name;
            MeritFunction h;
            std::vector<std::vector<double>> roots;
            std::size_t particles;
            int iterations;
        };
        const SearchBox b1{{-10.0}, {10.0}}, b2{{-5.0}, {5.0}}, b3{{-5.0, -5.0}, {5.0, 5.0}};
        std::vector<Problem> problems;
        problems.push_back({"x^2-1", MeritFunction::from_equations({Expr::power(x, 2) - 1.0}, 1, b1),
                            {{-1.0}, {1.0}}, 200, 150});
        problems.push_back({"x^2(x-2)^2", MeritFunction::from_equations({x * (x - 2.0)}, 1, b2),
                            {{0.0}, {2.0}}, 200, 200});
        // Himmelblau; the four minima come from Newton on the gradient-free system
        std::vector<std::vector<double>> himmelblau;
        for (double sx : {-5.0, -2.0, 2.0, 5.0}) {
            for (double sy : {-5.0, -2.0, 2.0, 5.0}) {
                double u = sx, v = sy;
                for (int it = 0; it < 80; ++it) {
                    const double f1 = u * u + v - 11.0, f2 = u + v * v - 7.0;
                    const double a = 2 * u, dd = 2 * v, det = a * dd - 1.0;
                    if (std::abs(det) < 1e-12) break;
                    u -= (dd * f1 - f2) / det;
                    v -= (-f1 + a * f2) / det;
                }
                if (std::hypot(u * u + v - 11.0, u + v * v - 7.0) > 1e-10) continue;
                bool seen = false;
                for (const auto& r : himmelblau) seen = seen || std::hypot(r[0] - u, r[1] - v) < 1e-6;
                if (!seen) himmelblau.push_back({u, v});
            }
        }
        problems.push_back({"himmelblau",
                            MeritFunction::from_equations(
                                {Expr::power(x, 2) + y - 11.0, x + Expr::power(y, 2) - 7.0}, 2, b3),
                            himmelblau, 400, 200});
        bool ok = himmelblau.size() == 4;
        for (const Problem& p : problems) {
            int hits = 0;
            bool deterministic = true;
            for (std::uint64_t seed = 1; seed <= 20; ++seed) {
                SwarmConfig c;
                c.box = p.h.box();
                c.particles = p.particles;
                c.max_iterations = p.iterations;
                c.polish_iterations = 100;
                c.seed = seed;
                const RootSet rs = solve(p.h, c);
                bool all = rs.roots.size() == p.roots.size();
                for (const auto& want : p.roots) {
                    bool found = false;
                    for (const Root& r : rs.roots) {
                        double dist = 0.0;
                        for (std::size_t k = 0; k < want.size(); ++k) dist = std::max(dist, std::abs(r.position[k] - want[k]));
                        found = found || dist < 1e-3;
                    }
                    all = all && found;
                }
                hits += all;
                if (seed == 1) {
                    const RootSet again = solve(p.h, c);
                    deterministic = again.roots.size() == rs.roots.size() && again.evaluations == rs.evaluations;
                    for (std::size_t k = 0; deterministic && k < rs.roots.size(); ++k) {
                        deterministic = again.roots[k].position == rs.roots[k].position;
                    }
                }
            }
            d << p.name << " " << hits << "/20" << (deterministic ? "" : " NONDETERMINISTIC") << "  ";
            ok = ok && hits >= 19 && deterministic;
        }
        return ok;
    });

    criterion("open endpoint", [&](std::ostringstream& d) {
        const ConstraintSystem sys = testing::load_model("slider.json");
        const EndpointConfig ec = SessionConfig{}.range_config("d1", 0).endpoints;
        const SeparatedFunction sf = separate(sys, "d1", {{"d2", 5.0}}, {});
        const auto open = open_candidates(sf, sf.singularity, ec);
        bool ok = !open.empty() && std::abs(open.front().value) < 1e-3;
        for (const auto& c : open) ok = ok && c.closedness == Closedness::Open;
        d << "slider d1 open candidates " << testing::to_text(values(open));
        const SeparatedFunction conflict = separate(sys, "d2", {{"d1", 10.0}}, {});
        const auto none = open_candidates(conflict, conflict.singularity, ec);
        d << "; with d1=10 fixed " << testing::to_text(values(none));
        return ok && none.empty() && !conflict.singularity.empty();
    });

    criterion("case 2 steps 1-4 and random walks", [&](std::ostringstream& d) {
        const std::vector<std::string> all{"d1", "d2", "d3", "d4", "d5", "d6", "d7", "alpha1", "alpha2"};
        const std::vector<std::pair<std::string, double>> table{{"d1", 10.0}, {"d2", 10.0}, {"d3", 10.0}};
        EditingSession hex = EditingSession::select(testing::load_model("hexagon.json"), all);
        bool shapes = true;
        for (std::size_t step = 1; step <= 4; ++step) {
            const RangeMap& m = hex.ranges();
            std::string off;
            for (const std::string& name : hex.unassigned()) {
                const ParameterRange* r = range_of(m, name);
                const bool angle = name.rfind("alpha", 0) == 0;
                const bool good = angle ? is_open_angle(r) : is_half_line(r);
                if (!good) off += " " + name + "=" + text(r);
            }
            shapes = shapes && off.empty();
            d << "step " << step << (off.empty() ? " ok" : ":" + off) << "; ";
            if (step <= table.size()) hex.assign(table[step - 1].first, table[step - 1].second);
        }

        WalkTally t;
        random_walks("triangle.json", {"d2", "d3"}, 25, t);
        random_walks("quadrangle.json", {"d1", "d3"}, 25, t);
        d << "walks " << t.ok << "/50, worst residual " << t.worst;
        if (!t.first_failure.empty()) d << " [" << t.first_failure << "]";
        return shapes && t.ok == 50;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
