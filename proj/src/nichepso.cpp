#include "prange/nichepso.hpp"

#include "prange/error.hpp"
#include "prange/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace prange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double width(const SearchBox& box, std::size_t j) {
    const double w = box.width(j);
    return w > 0.0 ? w : 1.0;
}

double normalized(const SearchBox& box, std::size_t j, double x) { return (x - box.lo[j]) / width(box, j); }

double inertia(const SwarmConfig& cfg, int t) {
    if (cfg.max_iterations <= 1) return cfg.inertia_start;
    const double s = static_cast<double>(t) / (cfg.max_iterations - 1);
    return cfg.inertia_start + (cfg.inertia_end - cfg.inertia_start) * std::min(1.0, s);
}

void clamp_into(const SearchBox& box, std::size_t j, double& x, double& v) {
    if (x < box.lo[j]) {
        x = box.lo[j];
        v = 0.0;
    } else if (x > box.hi[j]) {
        x = box.hi[j];
        v = 0.0;
    }
}

void clamp_velocity(const SwarmConfig& cfg, std::size_t j, double& v) {
    const double vmax = cfg.max_velocity * width(cfg.box, j);
    v = std::clamp(v, -vmax, vmax);
}

void record(Particle& p, int window) {
    p.history.push_back(p.pbest_fitness);
    if (p.history.size() > static_cast<std::size_t>(window)) p.history.erase(p.history.begin());
}

// Evaluates the given particles in one batch and updates their pbests.
void evaluate(std::vector<Particle*>& ps, const MeritFunction& h, const SwarmConfig& cfg, Swarm& swarm) {
    if (ps.empty()) return;
    const std::size_t dim = h.dim();
    std::vector<double> points(ps.size() * dim);
    for (std::size_t i = 0; i < ps.size(); ++i) std::copy(ps[i]->position.begin(), ps[i]->position.end(), points.begin() + i * dim);
    std::vector<double> fit(ps.size());
    sum_of_squares_batch(h.tape(), points, fit, cfg.parallel);
    swarm.evaluations += ps.size();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        Particle& p = *ps[i];
        p.fitness = fit[i];
        if (fit[i] < p.pbest_fitness) {
            p.pbest_fitness = fit[i];
            p.pbest = p.position;
        }
    }
}

std::size_t best_member(const Subswarm& s) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.members.size(); ++k) {
        if (s.members[k].pbest_fitness < s.members[best].pbest_fitness) best = k;
    }
    return best;
}

void update_radius(Subswarm& s, const SearchBox& box) {
    s.radius = 0.0;
    const auto& g = s.gbest();
    for (const Particle& p : s.members) s.radius = std::max(s.radius, normalized_distance(p.position, g, box));
}

Subswarm make_subswarm(std::vector<Particle> members, const SwarmConfig& cfg) {
    Subswarm s;
    s.members = std::move(members);
    s.best = best_member(s);
    s.rho = cfg.gc_rho;
    update_radius(s, cfg.box);
    return s;
}

double population_std(const std::vector<double>& v) {
    if (v.empty()) return kInf;
    for (double x : v) {
        if (!std::isfinite(x)) return kInf;
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / v.size());
}

bool on_boundary(std::span<const double> x, const SearchBox& box) {
    for (std::size_t j = 0; j < box.dim(); ++j) {
        const double tol = 1e-9 * width(box, j);
        if (x[j] <= box.lo[j] + tol || x[j] >= box.hi[j] - tol) return true;
    }
    return false;
}

} // namespace

double normalized_distance(std::span<const double> a, std::span<const double> b, const SearchBox& box) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = (a[j] - b[j]) / width(box, j);
        s += d * d;
    }
    return std::sqrt(s);
}

void SwarmConfig::validate(std::size_t dim) const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigError, "swarm config: " + what); };
    if (dim == 0) bad("dimension must be >= 1");
    if (particles == 0) bad("particleCount must be >= 1");
    if (max_iterations < 1) bad("maxIterations must be >= 1");
    if (box.dim() != dim) bad("search box has dimension " + std::to_string(box.dim()) + ", expected " + std::to_string(dim));
    if (!box.finite()) bad("search box must be finite");
    if (!(c1 > 0.0) || !(c2 > 0.0)) bad("c1, c2 must be > 0");
    if (stagnation_window < 1) bad("stagnation window must be >= 1");
    if (!(variance_threshold > 0.0) || !(merge_factor > 0.0) || !(absorb_factor > 0.0) || !(root_tolerance > 0.0) ||
        !(dedupe_radius > 0.0) || !(max_velocity > 0.0) || !(gc_rho > 0.0) || !(value_tolerance > 0.0) ||
        !(settle_radius > 0.0) || initial_velocity < 0.0) {
        bad("thresholds must be > 0");
    }
}

Swarm initialize(const SwarmConfig& cfg, std::size_t dim) {
    cfg.validate(dim);
    Swarm swarm;
    swarm.rng.seed(cfg.seed);
    const FaureSequence faure(dim);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    swarm.main.resize(cfg.particles);
    for (std::size_t i = 0; i < cfg.particles; ++i) {
        Particle& p = swarm.main[i];
        p.position.resize(dim);
        faure.point_in(i + 1, cfg.box, p.position);
        // a cognition-only particle with zero velocity never leaves its pbest
        p.velocity.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) p.velocity[j] = cfg.initial_velocity * width(cfg.box, j) * U(swarm.rng);
        p.pbest = p.position;
        p.fitness = p.pbest_fitness = kInf;
    }
    return swarm;
}

Swarm initialize(const SwarmConfig& cfg, std::size_t dim, const MeritFunction& h) {
    Swarm swarm = initialize(cfg, dim);
    std::vector<Particle*> ps;
    for (Particle& p : swarm.main) ps.push_back(&p);
    evaluate(ps, h, cfg, swarm);
    for (Particle& p : swarm.main) record(p, cfg.stagnation_window);
    return swarm;
}

void step_main(Swarm& swarm, const MeritFunction& h, const SwarmConfig& cfg) {
    const double w = inertia(cfg, swarm.iteration);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Particle*> ps;
    for (Particle& p : swarm.main) {
        for (std::size_t j = 0; j < p.position.size(); ++j) {
            double v = w * p.velocity[j] + cfg.c1 * U(swarm.rng) * (p.pbest[j] - p.position[j]);
            clamp_velocity(cfg, j, v);
            double x = p.position[j] + v;
            clamp_into(cfg.box, j, x, v);
            p.velocity[j] = v;
            p.position[j] = x;
        }
        ps.push_back(&p);
    }
    evaluate(ps, h, cfg, swarm);
    for (Particle& p : swarm.main) record(p, cfg.stagnation_window);
}

void step_subswarms(Swarm& swarm, const MeritFunction& h, const SwarmConfig& cfg) {
    const double w = inertia(cfg, swarm.iteration);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Particle*> ps;
    std::vector<double> before;
    for (Subswarm& s : swarm.subswarms) {
        const std::vector<double> g = s.gbest();
        before.push_back(s.gbest_fitness());
        for (std::size_t k = 0; k < s.members.size(); ++k) {
            Particle& p = s.members[k];
            for (std::size_t j = 0; j < p.position.size(); ++j) {
                double v;
                if (k == s.best) {
                    // guaranteed convergence: random search of radius rho around g
                    v = -p.position[j] + g[j] + w * p.velocity[j] + s.rho * width(cfg.box, j) * (1.0 - 2.0 * U(swarm.rng));
                } else {
                    v = w * p.velocity[j] + cfg.c1 * U(swarm.rng) * (p.pbest[j] - p.position[j]) +
                        cfg.c2 * U(swarm.rng) * (g[j] - p.position[j]);
                }
                clamp_velocity(cfg, j, v);
                double x = p.position[j] + v;
                clamp_into(cfg.box, j, x, v);
                p.velocity[j] = v;
                p.position[j] = x;
            }
            ps.push_back(&p);
        }
    }
    evaluate(ps, h, cfg, swarm);
    for (std::size_t i = 0; i < swarm.subswarms.size(); ++i) {
        Subswarm& s = swarm.subswarms[i];
        s.best = best_member(s);
        if (s.gbest_fitness() < before[i]) {
            ++s.successes;
            s.failures = 0;
        } else {
            ++s.failures;
            s.successes = 0;
        }
        if (s.successes > cfg.gc_success_limit) s.rho *= 2.0;
        if (s.failures > cfg.gc_failure_limit) s.rho *= 0.5;
        s.rho = std::clamp(s.rho, 1e-15, 1.0);
        update_radius(s, cfg.box);
    }
}

std::size_t identify_niches(Swarm& swarm, const SwarmConfig& cfg) {
    const std::size_t n = swarm.main.size();
    std::vector<bool> gone(n, false);
    std::size_t formed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gone[i]) continue;
        const Particle& p = swarm.main[i];
        if (p.history.size() < static_cast<std::size_t>(cfg.stagnation_window)) continue;
        if (!(population_std(p.history) < cfg.variance_threshold)) continue;

        std::size_t nearest = n;
        double best = kInf;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i || gone[k]) continue;
            const double d = normalized_distance(p.position, swarm.main[k].position, cfg.box);
            if (d < best) {
                best = d;
                nearest = k;
            }
        }
        std::vector<Particle> members{p};
        gone[i] = true;
        if (nearest < n) {
            members.push_back(swarm.main[nearest]);
            gone[nearest] = true;
        }
        swarm.subswarms.push_back(make_subswarm(std::move(members), cfg));
        ++formed;
    }
    if (formed) {
        std::vector<Particle> keep;
        keep.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!gone[i]) keep.push_back(std::move(swarm.main[i]));
        }
        swarm.main = std::move(keep);
    }
    swarm.subswarms_formed += formed;
    return formed;
}

void merge_and_absorb(Swarm& swarm, const SwarmConfig& cfg) {
    auto& subs = swarm.subswarms;
    const SearchBox& box = cfg.box;

    // Merge. Sweep along the first normalized coordinate: two gbests closer
    // than the merge distance are also that close along any single axis.
    for (bool changed = true; changed && subs.size() > 1;) {
        changed = false;
        std::vector<std::size_t> order(subs.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> keys(subs.size());
        for (std::size_t i = 0; i < subs.size(); ++i) keys[i] = normalized(box, 0, subs[i].gbest()[0]);
        auto key = [&](std::size_t i) { return keys[i]; };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
        // freshly spawned pairs span a nearest-neighbour gap; letting them
        // merge on that radius collapses every niche into one
        auto settled = [&](std::size_t i) { return subs[i].radius <= cfg.settle_radius; };
        double rmax = 0.0;
        for (const Subswarm& s : subs) {
            if (s.radius <= cfg.settle_radius) rmax = std::max(rmax, s.radius);
        }

        std::vector<bool> dead(subs.size(), false);
        for (std::size_t oa = 0; oa < order.size(); ++oa) {
            const std::size_t a = order[oa];
            if (dead[a] || !settled(a)) continue;
            for (std::size_t ob = oa + 1; ob < order.size(); ++ob) {
                const std::size_t b = order[ob];
                const double reach = std::max(cfg.merge_factor * (subs[a].radius + rmax), cfg.merge_floor);
                if (key(b) - key(a) > reach) break;
                if (dead[b] || !settled(b)) continue;
                const double d = normalized_distance(subs[a].gbest(), subs[b].gbest(), box);
                if (d < cfg.merge_factor * (subs[a].radius + subs[b].radius) || d < cfg.merge_floor) {
                    const bool b_better = subs[b].gbest_fitness() < subs[a].gbest_fitness();
                    const double rho = b_better ? subs[b].rho : subs[a].rho;
                    for (Particle& p : subs[b].members) subs[a].members.push_back(std::move(p));
                    subs[b].members.clear();
                    subs[a].best = best_member(subs[a]);
                    subs[a].rho = rho;
                    subs[a].successes = subs[a].failures = 0;
                    update_radius(subs[a], box);
                    rmax = std::max(rmax, subs[a].radius);
                    dead[b] = true;
                    changed = true;
                    ++swarm.merges;
                }
            }
        }
        if (changed) {
            std::vector<Subswarm> keep;
            for (std::size_t i = 0; i < subs.size(); ++i) {
                if (!dead[i]) keep.push_back(std::move(subs[i]));
            }
            subs = std::move(keep);
        }
    }

    // Absorb main-swarm particles that wandered inside a subswarm.
    if (subs.empty() || swarm.main.empty()) return;
    std::vector<Particle> keep;
    for (Particle& p : swarm.main) {
        std::size_t target = subs.size();
        double best = kInf;
        for (std::size_t s = 0; s < subs.size(); ++s) {
            const double r = cfg.absorb_factor * subs[s].radius;
            if (r <= 0.0) continue;
            const double d = normalized_distance(p.position, subs[s].gbest(), box);
            if (d <= r && d < best) {
                best = d;
                target = s;
            }
        }
        if (target < subs.size()) {
            subs[target].members.push_back(std::move(p));
            subs[target].best = best_member(subs[target]);
        } else {
            keep.push_back(std::move(p));
        }
    }
    swarm.main = std::move(keep);
}

RootSet solve(const MeritFunction& h, const SwarmConfig& cfg,
              const std::function<double(std::span<const double>)>& value) {
    const std::size_t dim = h.dim();
    Swarm swarm = initialize(cfg, dim, h);
    for (int t = 0; t < cfg.max_iterations; ++t) {
        swarm.iteration = t;
        step_main(swarm, h, cfg);
        step_subswarms(swarm, h, cfg);
        identify_niches(swarm, cfg);
        merge_and_absorb(swarm, cfg);
    }

    RootSet out;
    out.evaluations = swarm.evaluations;
    out.subswarms = swarm.subswarms_formed;
    out.candidates = swarm.subswarms.size();

    LmOptions lm;
    lm.max_iterations = cfg.polish_iterations;
    lm.target_cost = 1e-30;
    std::vector<Root> found;
    for (const Subswarm& s : swarm.subswarms) {
        LmResult r = levenberg_marquardt(h.residual_system(), s.gbest(), lm);
        if (!(r.cost <= cfg.root_tolerance)) continue;
        Root root{std::move(r.x), r.cost, false, false};
        bool dup = false;
        for (Root& kept : found) {
            if (normalized_distance(kept.position, root.position, h.box()) < cfg.dedupe_radius) {
                if (root.fitness < kept.fitness) kept = root;
                dup = true;
                break;
            }
        }
        if (!dup) found.push_back(std::move(root));
    }
    for (Root& r : found) r.on_box_boundary = on_boundary(r.position, h.box());

    if (value && found.size() >= 3) {
        std::vector<std::pair<double, std::size_t>> vals;
        for (std::size_t i = 0; i < found.size(); ++i) {
            try {
                const double v = value(found[i].position);
                if (std::isfinite(v)) vals.emplace_back(v, i);
            } catch (const Error&) {
            }
        }
        std::sort(vals.begin(), vals.end());
        for (std::size_t a = 0; a < vals.size();) {
            std::size_t b = a + 1;
            while (b < vals.size() && vals[b].first - vals[b - 1].first <= cfg.value_tolerance) ++b;
            if (b - a >= 3) {
                for (std::size_t k = a; k < b; ++k) found[vals[k].second].continuum = true;
                out.continuum = true;
            }
            a = b;
        }
    }
    out.roots = std::move(found);
    return out;
}

} // namespace prange
