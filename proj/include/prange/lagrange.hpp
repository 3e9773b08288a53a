#pragma once

#include "prange/expr.hpp"
#include "prange/faure.hpp"
#include "prange/least_squares.hpp"
#include "prange/separation.hpp"
#include "prange/tape.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace prange {

/// L(X, Lambda) = f(X) + sum lambda_i g_i(X) and its stationarity equations
/// {dL/dx_1 .. dL/dx_m} followed by {g_1 .. g_n}. Variables 0..m-1 are X,
/// m..m+n-1 are the multipliers.
struct LagrangeSystem {
    Expr L;
    std::vector<Expr> equations;
    std::size_t m = 0;
    std::size_t n = 0;

    std::size_t dim() const { return m + n; }
};

LagrangeSystem build_lagrange(const Expr& f, const std::vector<Expr>& G, std::size_t m);
LagrangeSystem build_lagrange(const SeparatedFunction& sf);

/// h = sum of squared equations. Evaluation goes through a compiled tape;
/// the residual system (with Jacobian) is what the root polish runs on.
class MeritFunction {
public:
    MeritFunction() = default;
    MeritFunction(std::vector<Expr> equations, std::size_t dim, SearchBox box);

    static MeritFunction from_equations(std::vector<Expr> equations, std::size_t dim, SearchBox box) {
        return MeritFunction(std::move(equations), dim, std::move(box));
    }

    std::size_t dim() const { return dim_; }
    const SearchBox& box() const { return box_; }
    const Expr& h() const { return h_; }
    const std::vector<Expr>& equations() const { return system_.expressions(); }
    const Tape& tape() const { return tape_; }
    const ResidualSystem& residual_system() const { return system_; }

    /// +inf outside the domain of any equation.
    double operator()(std::span<const double> x, std::vector<double>& scratch) const {
        return tape_.sum_of_squares(x, scratch);
    }

private:
    std::size_t dim_ = 0;
    SearchBox box_;
    Expr h_;
    Tape tape_;
    ResidualSystem system_;
};

constexpr double kLambdaBound = 100.0;

/// Search box over (X, Lambda): the separated function's coordinate box plus
/// [-100, 100] per multiplier.
SearchBox lagrange_box(const SeparatedFunction& sf);

MeritFunction build_merit(const LagrangeSystem& ls, SearchBox box);

} // namespace prange
