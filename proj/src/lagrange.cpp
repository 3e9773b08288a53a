#include "prange/lagrange.hpp"

#include "prange/error.hpp"

namespace prange {

LagrangeSystem build_lagrange(const Expr& f, const std::vector<Expr>& G, std::size_t m) {
    LagrangeSystem ls;
    ls.m = m;
    ls.n = G.size();
    Expr L = f;
    for (std::size_t i = 0; i < G.size(); ++i) L = Expr::add(L, Expr::multiply(Expr::variable(m + i), G[i]));
    ls.L = L;

    // dL/dx_j = df/dx_j + sum lambda_i dg_i/dx_j; built termwise so each
    // lambda_i multiplies its own simplified partial
    for (std::size_t j = 0; j < m; ++j) {
        Expr d = simplify(differentiate(f, j));
        for (std::size_t i = 0; i < G.size(); ++i) {
            const Expr dg = simplify(differentiate(G[i], j));
            if (dg.is_constant(0.0)) continue;
            d = simplify(Expr::add(d, Expr::multiply(Expr::variable(m + i), dg)));
        }
        ls.equations.push_back(d);
    }
    for (const Expr& g : G) ls.equations.push_back(g);
    return ls;
}

LagrangeSystem build_lagrange(const SeparatedFunction& sf) { return build_lagrange(sf.f, sf.G, sf.m()); }

MeritFunction::MeritFunction(std::vector<Expr> equations, std::size_t dim, SearchBox box)
    : dim_(dim), box_(std::move(box)) {
    if (box_.dim() != dim_) throw Error(ErrorCode::ConfigError, "merit search box has the wrong dimension");
    Expr h = Expr::constant(0.0);
    for (const Expr& e : equations) h = simplify(Expr::add(h, Expr::power(e, 2)));
    h_ = h;
    tape_ = Tape(equations, dim_);
    system_ = ResidualSystem(std::move(equations), dim_);
}

SearchBox lagrange_box(const SeparatedFunction& sf) {
    SearchBox box = sf.box;
    for (std::size_t i = 0; i < sf.n(); ++i) {
        box.lo.push_back(-kLambdaBound);
        box.hi.push_back(kLambdaBound);
    }
    return box;
}

MeritFunction build_merit(const LagrangeSystem& ls, SearchBox box) {
    return MeritFunction(ls.equations, ls.dim(), std::move(box));
}

} // namespace prange
