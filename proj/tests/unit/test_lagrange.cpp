#include <doctest.h>

#include "prange/lagrange.hpp"
#include "prange/separation.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace prange;

namespace {

Expr v(std::size_t i) { return Expr::variable(i); }

MeritFunction linear_case() {
    const LagrangeSystem ls = build_lagrange(v(0), {v(0) - 5.0}, 1);
    return build_merit(ls, SearchBox{{-10.0, -10.0}, {10.0, 10.0}});
}

} // namespace

TEST_CASE("f = x subject to x = 5") {
    const LagrangeSystem ls = build_lagrange(v(0), {v(0) - 5.0}, 1);
    REQUIRE(ls.equations.size() == 2);
    CHECK(ls.m == 1);
    CHECK(ls.n == 1);
    const std::vector<double> root{5.0, -1.0};
    CHECK(eval(ls.equations[0], root) == 0.0);  // 1 + lambda
    CHECK(eval(ls.equations[1], root) == 0.0);  // x - 5
    CHECK(eval(ls.equations[0], std::vector<double>{0.0, 2.0}) == 3.0);
}

TEST_CASE("merit values") {
    const MeritFunction h = linear_case();
    std::vector<double> scratch;
    CHECK(h(std::vector<double>{5.0, -1.0}, scratch) == 0.0);
    CHECK(h(std::vector<double>{5.0, 0.0}, scratch) == 1.0);
    CHECK(h(std::vector<double>{6.0, -1.0}, scratch) == 1.0);
    CHECK(eval(h.h(), std::vector<double>{6.0, 0.0}) == 2.0);
}

TEST_CASE("equation count is m + n") {
    const LagrangeSystem two_one = build_lagrange(v(0) * v(1), {v(0) + v(1) - 1.0}, 2);
    CHECK(two_one.equations.size() == 3);

    const ConstraintSystem sys = testing::load_model("triangle.json");
    const SeparatedFunction sf = separate(sys, "d3", {{"d1", 10.0}, {"d2", 20.0}}, {});
    const LagrangeSystem ls = build_lagrange(sf);
    CHECK(ls.m == sf.m());
    CHECK(ls.n == sf.n());
    CHECK(ls.equations.size() == sf.m() + sf.n());
    CHECK(ls.dim() == 5);
}

TEST_CASE("equations match finite differences of L on random systems") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> in(0.5, 2.0);
    for (int t = 0; t < 20; ++t) {
        const std::size_t m = 2 + rng() % 3;
        const std::size_t n = 1 + rng() % m;
        const Expr f = testing::random_tree(rng, m, 3);
        std::vector<Expr> G;
        for (std::size_t i = 0; i < n; ++i) G.push_back(testing::random_tree(rng, m, 3));
        const LagrangeSystem ls = build_lagrange(f, G, m);
        REQUIRE(ls.equations.size() == m + n);
        std::vector<double> p(m + n);
        for (double& x : p) x = in(rng);
        auto L = [&](std::span<const double> q) { return eval(ls.L, q); };
        for (std::size_t j = 0; j < m + n; ++j) {
            // dL/dlambda_i = g_i, so every equation is a partial of L
            const double fd = testing::central_difference(L, p, j);
            CHECK(testing::relative_error(eval(ls.equations[j], p), fd) < 1e-6);
        }
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(eval(ls.equations[m + i], p) == doctest::Approx(eval(G[i], p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("merit is the sum of squared equations") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> in(0.5, 2.0);
    const Expr f = testing::random_tree(rng, 3, 3);
    const std::vector<Expr> G{testing::random_tree(rng, 3, 3), testing::random_tree(rng, 3, 2)};
    const LagrangeSystem ls = build_lagrange(f, G, 3);
    const MeritFunction h = build_merit(ls, SearchBox{std::vector<double>(5, -1.0), std::vector<double>(5, 1.0)});
    std::vector<double> scratch;
    for (int k = 0; k < 50; ++k) {
        std::vector<double> p(5);
        for (double& x : p) x = in(rng);
        double ss = 0.0;
        for (const Expr& e : ls.equations) ss += eval(e, p) * eval(e, p);
        CHECK(h(p, scratch) == doctest::Approx(ss).epsilon(1e-12));
        CHECK(h(p, scratch) >= 0.0);
    }
}

TEST_CASE("merit does not depend on the order of G") {
    const Expr f = Expr::power(v(0), 2) + v(1);
    const std::vector<Expr> G{v(0) - v(1), Expr::power(v(1), 2) + v(2) - 1.0};
    const std::vector<Expr> R{G[1], G[0]};
    const SearchBox box{std::vector<double>(5, -1.0), std::vector<double>(5, 1.0)};
    const MeritFunction a = build_merit(build_lagrange(f, G, 3), box);
    const MeritFunction b = build_merit(build_lagrange(f, R, 3), box);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> in(-1.0, 1.0);
    std::vector<double> scratch;
    for (int k = 0; k < 50; ++k) {
        std::vector<double> p(5);
        for (double& x : p) x = in(rng);
        const std::vector<double> q{p[0], p[1], p[2], p[4], p[3]};  // multipliers swap with their equations
        CHECK(a(p, scratch) == doctest::Approx(b(q, scratch)).epsilon(1e-12));
    }
}

TEST_CASE("lagrange box bounds the multipliers") {
    const ConstraintSystem sys = testing::load_model("triangle.json");
    const SeparatedFunction sf = separate(sys, "d3", {{"d1", 10.0}, {"d2", 20.0}}, {});
    const SearchBox box = lagrange_box(sf);
    REQUIRE(box.dim() == sf.m() + sf.n());
    for (std::size_t i = sf.m(); i < box.dim(); ++i) {
        CHECK(box.lo[i] == -kLambdaBound);
        CHECK(box.hi[i] == kLambdaBound);
    }
}
