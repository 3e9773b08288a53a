#include "prange/ranges.hpp"

#include "prange/error.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace prange {

namespace {

std::string number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

bool Interval::contains(double v, double tol) const {
    const bool above = lo.closed ? v >= lo.value - tol : v > lo.value;
    const bool below = hi.infinite || (hi.closed ? v <= hi.value + tol : v < hi.value);
    return above && below;
}

bool ParameterRange::contains(double v, double tol) const {
    for (const Interval& i : intervals) {
        if (i.contains(v, tol * (1.0 + std::abs(v)))) return true;
    }
    return false;
}

std::string to_string(const ParameterRange& r) {
    if (r.intervals.empty()) return "{}";
    std::string out;
    for (const Interval& i : r.intervals) {
        if (!out.empty()) out += " U ";
        out += i.lo.closed ? "[" : "(";
        out += number(i.lo.value) + ", ";
        out += i.hi.infinite ? "+inf)" : number(i.hi.value) + (i.hi.closed ? "]" : ")");
    }
    return out;
}

FeasibilityVerdict check_feasible(const SeparatedFunction& sf, double p, const FeasibilityConfig& cfg) {
    std::vector<Expr> eqs = sf.G;
    if (sf.kind == ParamKind::Angle) eqs.push_back(sf.cosine - std::cos(p));
    else eqs.push_back(sf.f - p);

    FeasibilityVerdict v;
    const ResidualSystem rs(std::move(eqs), sf.m());
    if (sf.m() == 0) {
        std::vector<double> scratch;
        v.best_residual = rs.cost({}, scratch);
        v.solvable = v.best_residual < cfg.efeas;
        v.witness = sf.pinned;
        return v;
    }
    MultistartOptions ms;
    ms.starts = cfg.starts;
    ms.success_cost = cfg.efeas;
    ms.lm = cfg.lm;
    const MultistartResult r = multistart(rs, sf.box, ms, cfg.parallel);
    v.solvable = r.success;
    v.best_residual = r.best_cost;
    if (!r.best_x.empty()) v.witness = sf.expand(r.best_x);
    return v;
}

ParameterRange validate(const std::vector<EndpointCandidate>& candidates, const SeparatedFunction& sf,
                        const ValidateConfig& cfg) {
    ParameterRange out;
    out.parameter = sf.target;
    out.kind = sf.kind;
    out.provenance.candidates = candidates;
    out.provenance.probe_span = cfg.probe_span;
    out.provenance.gauge = to_string(sf.gauge_mode);

    auto test = [&](double p, const char* role) {
        const FeasibilityVerdict v = check_feasible(sf, p, cfg.feasibility);
        out.provenance.samples.push_back({p, role, v.solvable, v.best_residual});
        return v.solvable;
    };

    const std::size_t k = candidates.size();
    std::vector<bool> closed_end(k, false);
    for (std::size_t i = 0; i < k; ++i) {
        if (candidates[i].infinite) continue;
        const bool feasible = test(candidates[i].value, "endpoint");
        closed_end[i] = feasible && candidates[i].closedness == Closedness::Closed && !candidates[i].singular;
    }

    std::vector<Interval> valid;
    std::vector<std::size_t> starts;  // candidate index of each valid interval's lo
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const EndpointCandidate& lo = candidates[i];
        const EndpointCandidate& hi = candidates[i + 1];
        bool ok;
        if (hi.infinite) {
            ok = test(lo.value + cfg.probe_span, "probe");
            if (cfg.paranoid) {
                for (double f : {2.0, 4.0, 8.0}) ok = test(lo.value + f * cfg.probe_span, "probe") && ok;
            }
        } else {
            ok = test(0.5 * (lo.value + hi.value), "midpoint");
        }
        if (!ok) continue;
        Interval iv;
        iv.lo = {lo.value, closed_end[i], false};
        iv.hi = hi.infinite ? RangeBound{hi.value, false, true} : RangeBound{hi.value, closed_end[i + 1], false};
        if (!valid.empty() && starts.back() + 1 == i && closed_end[i]) {
            valid.back().hi = iv.hi;  // shared closed endpoint: one interval
        } else {
            valid.push_back(iv);
        }
        starts.push_back(i);
    }
    out.intervals = std::move(valid);
    return out;
}

ParameterRange compute_range(const SeparatedFunction& sf, const RangeConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RootSet roots;
    const auto closed = closed_candidates(sf, cfg.endpoints, &roots);
    std::vector<EndpointCandidate> open;
    if (cfg.open_endpoints && !sf.singularity.empty()) open = open_candidates(sf, sf.singularity, cfg.endpoints);
    const auto candidates = assemble_candidates(closed, open, sf.kind, cfg.endpoints.dedupe);

    ValidateConfig vc;
    vc.feasibility = cfg.feasibility;
    vc.probe_span = 10.0 * sf.scale;
    vc.paranoid = cfg.paranoid;
    ParameterRange r = validate(candidates, sf, vc);
    r.provenance.roots = roots.roots.size();
    r.provenance.continuum = roots.continuum;
    r.provenance.seed = cfg.endpoints.swarm.seed;
    r.provenance.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

Configuration solve_configuration(const ConstraintSystem& sys, const std::map<std::string, double>& values,
                                  const FeasibilityConfig& cfg, const SeparationOptions& separation) {
    const std::vector<Expr> full = sys.residuals(values);
    const Reduction red = reduce(sys, full, values, separation);
    const ResidualSystem rs(red.apply(full), red.free_slots.size());
    Configuration c;
    if (red.free_slots.empty()) {
        std::vector<double> scratch;
        c.residual = rs.cost({}, scratch);
        c.solved = c.residual < cfg.efeas;
        c.x = red.pinned;
        return c;
    }
    MultistartOptions ms;
    ms.starts = cfg.starts;
    ms.success_cost = cfg.efeas;
    ms.lm = cfg.lm;
    const MultistartResult r = multistart(rs, red.box, ms, cfg.parallel);
    c.solved = r.success;
    c.residual = r.best_cost;
    if (!r.best_x.empty()) c.x = red.expand(r.best_x);
    return c;
}

} // namespace prange
