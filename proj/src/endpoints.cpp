#include "prange/endpoints.hpp"

#include "prange/error.hpp"
#include "prange/lagrange.hpp"
#include "prange/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prange {

namespace {

int priority(Provenance p) {
    switch (p) {
        case Provenance::LagrangeStationary: return 0;
        case Provenance::SingularLimit: return 1;
        case Provenance::DomainBound: return 2;
    }
    return 3;
}

double clamp_domain(double v, ParamKind kind) {
    v = std::max(v, 0.0);
    if (kind == ParamKind::Angle) v = std::min(v, M_PI);
    return v;
}

// Sorts by value and keeps one candidate per cluster of values within
// `tol`; `better(a, b)` picks the representative.
template <class Better>
std::vector<EndpointCandidate> cluster(std::vector<EndpointCandidate> cs, double tol, Better better) {
    std::stable_sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    std::vector<EndpointCandidate> out;
    for (std::size_t a = 0; a < cs.size();) {
        std::size_t b = a + 1;
        while (b < cs.size() && cs[b].value - cs[b - 1].value <= tol) ++b;
        std::size_t pick = a;
        for (std::size_t k = a + 1; k < b; ++k) {
            if (better(cs[k], cs[pick])) pick = k;
        }
        EndpointCandidate c = cs[pick];
        for (std::size_t k = a; k < b; ++k) {
            if (cs[k].provenance == Provenance::DomainBound) c.value = cs[k].value;
            if (cs[k].provenance == Provenance::SingularLimit) c.singular = true;
        }
        out.push_back(std::move(c));
        a = b;
    }
    return out;
}

} // namespace

const char* to_string(Closedness c) { return c == Closedness::Closed ? "closed" : "open"; }

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::LagrangeStationary: return "lagrange-stationary";
        case Provenance::SingularLimit: return "singular-limit";
        case Provenance::DomainBound: return "domain-bound";
    }
    return "?";
}

std::vector<EndpointCandidate> closed_candidates(const SeparatedFunction& sf, const EndpointConfig& cfg,
                                                 RootSet* roots) {
    std::vector<EndpointCandidate> found;
    if (sf.m() == 0) {
        // nothing left to move: f is a constant, valid only if G holds
        for (const Expr& g : sf.G) {
            if (std::abs(eval(g, {})) > 1e-9) return {};
        }
        EndpointCandidate c;
        c.value = clamp_domain(eval(sf.f, {}), sf.kind);
        c.witness = sf.pinned;
        return {c};
    }

    const LagrangeSystem ls = build_lagrange(sf);
    const MeritFunction h = build_merit(ls, lagrange_box(sf));
    SwarmConfig swarm = cfg.swarm;
    swarm.box = h.box();
    swarm.value_tolerance = cfg.dedupe;
    RootSet rs = solve(h, swarm, [&](std::span<const double> x) { return sf.value(x); });

    for (const Root& r : rs.roots) {
        double v;
        try {
            v = sf.value(r.position);
        } catch (const DomainError&) {
            continue;
        }
        if (!std::isfinite(v)) continue;
        EndpointCandidate c;
        c.value = clamp_domain(v, sf.kind);
        c.witness = sf.expand(std::span<const double>(r.position).subspan(0, sf.m()));
        c.box_boundary = r.on_box_boundary;
        found.push_back(std::move(c));
    }
    if (roots) *roots = std::move(rs);
    // one witness per value: the first in sorted order is as good as any
    return cluster(std::move(found), cfg.dedupe, [](const auto&, const auto&) { return false; });
}

std::vector<EndpointCandidate> open_candidates(const SeparatedFunction& sf, const std::vector<Expr>& terms,
                                               const EndpointConfig& cfg, int depth) {
    if (depth > 2) throw Error(ErrorCode::RecursionLimit, "singularity analysis nested deeper than 2");
    if (!(cfg.delta > 0.0)) throw Error(ErrorCode::ConfigError, "delta must be > 0");

    // (c - d)/sqrt(d) keeps the multiplier of the extra equation O(1)
    auto augmented = [&](const Expr& c, double d) {
        return augment(sf, {Expr::constant(1.0 / std::sqrt(d)) * (c - d)});
    };

    // |f| has a kink next to the sqrt(delta) roots; LM needs longer there
    EndpointConfig inner = cfg;
    inner.swarm.polish_iterations = std::max(cfg.swarm.polish_iterations, 500);

    std::vector<EndpointCandidate> out;
    for (const Expr& term : terms) {
        const SeparatedFunction at_delta = augmented(term, cfg.delta);
        if (sf.m() > 0) {
            MultistartOptions ms;
            ms.starts = cfg.probe_starts;
            ms.success_cost = cfg.feasibility;
            const ResidualSystem probe(at_delta.G, at_delta.m());
            if (!multistart(probe, at_delta.box, ms, cfg.swarm.parallel).success) continue;
        }
        const auto v1 = closed_candidates(at_delta, inner);
        const auto v2 = closed_candidates(augmented(term, cfg.delta / 4.0), inner);
        for (const EndpointCandidate& a : v1) {
            double value = a.value;
            const EndpointCandidate* partner = nullptr;
            for (const EndpointCandidate& b : v2) {
                if (!partner || std::abs(b.value - a.value) < std::abs(partner->value - a.value)) partner = &b;
            }
            // linear in sqrt(delta): v(d) = v0 + k sqrt(d)
            if (partner) value = 2.0 * partner->value - a.value;
            EndpointCandidate c = a;
            c.value = clamp_domain(value, sf.kind);
            c.closedness = Closedness::Open;
            c.provenance = Provenance::SingularLimit;
            out.push_back(std::move(c));
        }
    }
    return cluster(std::move(out), cfg.dedupe, [](const auto&, const auto&) { return false; });
}

std::vector<EndpointCandidate> assemble_candidates(const std::vector<EndpointCandidate>& closed,
                                                   const std::vector<EndpointCandidate>& open, ParamKind kind,
                                                   double dedupe) {
    std::vector<EndpointCandidate> all;
    for (const auto& c : closed) all.push_back(c);
    for (const auto& c : open) all.push_back(c);
    for (auto& c : all) c.value = clamp_domain(c.value, kind);

    EndpointCandidate zero;
    zero.value = 0.0;
    zero.provenance = Provenance::DomainBound;
    all.push_back(zero);
    if (kind == ParamKind::Angle) {
        EndpointCandidate pi = zero;
        pi.value = M_PI;
        all.push_back(pi);
    }

    auto out = cluster(std::move(all), dedupe, [](const EndpointCandidate& a, const EndpointCandidate& b) {
        return priority(a.provenance) < priority(b.provenance);
    });
    if (kind != ParamKind::Angle) {
        EndpointCandidate inf;
        inf.value = std::numeric_limits<double>::infinity();
        inf.infinite = true;
        inf.closedness = Closedness::Open;
        inf.provenance = Provenance::DomainBound;
        out.push_back(inf);
    }
    return out;
}

} // namespace prange
