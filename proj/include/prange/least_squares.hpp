#pragma once

#include "prange/expr.hpp"
#include "prange/faure.hpp"
#include "prange/tape.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace prange {

/// Residual vector r(x) and its dense Jacobian, both compiled from symbolic
/// expressions over `unknowns` variables.
class ResidualSystem {
public:
    ResidualSystem() = default;
    ResidualSystem(std::vector<Expr> residuals, std::size_t unknowns);

    std::size_t unknowns() const { return unknowns_; }
    std::size_t residual_count() const { return residuals_.size(); }
    const std::vector<Expr>& expressions() const { return residuals_; }

    bool residuals(std::span<const double> x, std::span<double> r, std::vector<double>& scratch) const;
    /// Row-major residual_count() x unknowns().
    bool jacobian(std::span<const double> x, std::span<double> jac, std::vector<double>& scratch) const;
    double cost(std::span<const double> x, std::vector<double>& scratch) const;

private:
    std::vector<Expr> residuals_;
    std::size_t unknowns_ = 0;
    Tape residual_tape_;
    Tape jacobian_tape_;
};

struct LmOptions {
    int max_iterations = 100;
    double target_cost = 1e-24;   // stop as soon as sum r^2 drops below
    double initial_damping = 1e-3;
    double min_relative_step = 1e-15;
};

struct LmResult {
    std::vector<double> x;
    double cost = 0.0;   // sum of squared residuals
    int iterations = 0;
};

/// Levenberg-Marquardt (damped Gauss-Newton) on sum r(x)^2. Never returns a
/// point with a higher cost than the start.
LmResult levenberg_marquardt(const ResidualSystem& system, std::span<const double> x0,
                             const LmOptions& options = {});

struct MultistartOptions {
    std::size_t starts = 64;
    double success_cost = 1e-10;
    std::uint64_t first_index = 1;  // Faure index of the first start
    LmOptions lm;
};

struct MultistartResult {
    bool success = false;
    double best_cost = 0.0;
    std::vector<double> best_x;
    std::size_t best_start = 0;
    std::size_t starts_run = 0;
};

/// Runs LM from Faure points in `box` and stops at the first start whose
/// cost falls below `success_cost`. Without a success it reports the lowest
/// cost seen (ties go to the earlier start). Both versions return identical
/// results; the parallel one runs blocks of starts concurrently.
MultistartResult multistart_serial(const ResidualSystem& system, const SearchBox& box,
                                   const MultistartOptions& options);
MultistartResult multistart_parallel(const ResidualSystem& system, const SearchBox& box,
                                     const MultistartOptions& options);

inline MultistartResult multistart(const ResidualSystem& system, const SearchBox& box,
                                   const MultistartOptions& options, bool parallel) {
    return parallel ? multistart_parallel(system, box, options) : multistart_serial(system, box, options);
}

} // namespace prange
