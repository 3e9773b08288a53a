#include "prange/least_squares.hpp"

#include "prange/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prange {

ResidualSystem::ResidualSystem(std::vector<Expr> residuals, std::size_t unknowns)
    : residuals_(std::move(residuals)), unknowns_(unknowns) {
    residual_tape_ = Tape(residuals_, unknowns_);
    std::vector<Expr> entries;
    entries.reserve(residuals_.size() * unknowns_);
    for (const Expr& r : residuals_) {
        for (std::size_t j = 0; j < unknowns_; ++j) entries.push_back(simplify(differentiate(r, j)));
    }
    jacobian_tape_ = Tape(entries, unknowns_);
}

bool ResidualSystem::residuals(std::span<const double> x, std::span<double> r,
                               std::vector<double>& scratch) const {
    return residual_tape_.evaluate(x, r, scratch);
}

bool ResidualSystem::jacobian(std::span<const double> x, std::span<double> jac,
                              std::vector<double>& scratch) const {
    return jacobian_tape_.evaluate(x, jac, scratch);
}

double ResidualSystem::cost(std::span<const double> x, std::vector<double>& scratch) const {
    return residual_tape_.sum_of_squares(x, scratch);
}

LmResult levenberg_marquardt(const ResidualSystem& system, std::span<const double> x0,
                             const LmOptions& options) {
    using Mat = Eigen::MatrixXd;
    using Vec = Eigen::VectorXd;
    const auto n = static_cast<Eigen::Index>(system.unknowns());
    const auto m = static_cast<Eigen::Index>(system.residual_count());

    LmResult result;
    result.x.assign(x0.begin(), x0.end());
    std::vector<double> scratch;
    std::vector<double> r(static_cast<std::size_t>(m)), jac(static_cast<std::size_t>(m * n));
    std::vector<double> trial(static_cast<std::size_t>(n));

    result.cost = system.cost(result.x, scratch);
    if (!std::isfinite(result.cost) || m == 0) return result;

    double damping = options.initial_damping;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (result.cost <= options.target_cost) break;
        result.iterations = it + 1;
        if (!system.residuals(result.x, r, scratch) || !system.jacobian(result.x, jac, scratch)) break;

        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(
            jac.data(), m, n);
        Eigen::Map<const Vec> rv(r.data(), m);
        const Mat JtJ = J.transpose() * J;
        const Vec g = J.transpose() * rv;
        if (!g.allFinite()) break;

        bool improved = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Mat A = JtJ;
            for (Eigen::Index k = 0; k < n; ++k) A(k, k) += damping * (JtJ(k, k) + 1e-12);
            const Vec step = A.ldlt().solve(-g);
            if (!step.allFinite()) {
                damping *= 10.0;
                continue;
            }
            double xnorm = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                trial[k] = result.x[k] + step[k];
                xnorm = std::max(xnorm, std::abs(result.x[k]));
            }
            const double c = system.cost(trial, scratch);
            if (c < result.cost) {
                const bool tiny = step.lpNorm<Eigen::Infinity>() <= options.min_relative_step * (1.0 + xnorm);
                result.x = trial;
                result.cost = c;
                damping = std::max(damping / 3.0, 1e-15);
                improved = !tiny;
                break;
            }
            damping *= 4.0;
        }
        if (!improved) break;
    }
    return result;
}

namespace {

MultistartResult run_block(const ResidualSystem& system, const SearchBox& box, const MultistartOptions& options,
                           std::size_t begin, std::size_t end, bool parallel) {
    const FaureSequence faure(box.dim());
    const std::size_t count = end - begin;
    std::vector<LmResult> results(count);
    auto run_one = [&](std::size_t k) {
        std::vector<double> start(box.dim());
        faure.point_in(options.first_index + begin + k, box, start);
        LmOptions lm = options.lm;
        lm.target_cost = std::min(lm.target_cost, options.success_cost * 1e-6);
        results[k] = levenberg_marquardt(system, start, lm);
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) run_one(static_cast<std::size_t>(k));
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            run_one(k);
            if (results[k].cost < options.success_cost) {
                results.resize(k + 1);
                break;
            }
        }
    }

    MultistartResult out;
    out.best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < results.size(); ++k) {
        ++out.starts_run;
        const LmResult& r = results[k];
        if (r.cost < options.success_cost) {
            out.success = true;
            out.best_cost = r.cost;
            out.best_x = r.x;
            out.best_start = begin + k;
            return out;
        }
        if (r.cost < out.best_cost || out.best_x.empty()) {
            out.best_cost = r.cost;
            out.best_x = r.x;
            out.best_start = begin + k;
        }
    }
    return out;
}

void merge_into(MultistartResult& total, const MultistartResult& block) {
    total.starts_run += block.starts_run;
    if (block.success || block.best_cost < total.best_cost || total.best_x.empty()) {
        total.success = block.success;
        total.best_cost = block.best_cost;
        total.best_x = block.best_x;
        total.best_start = block.best_start;
    }
}

void check_box(const ResidualSystem& system, const SearchBox& box) {
    if (box.dim() != system.unknowns() || !box.finite()) {
        throw Error(ErrorCode::ConfigError, "multistart box does not match the residual system");
    }
}

} // namespace

MultistartResult multistart_serial(const ResidualSystem& system, const SearchBox& box,
                                   const MultistartOptions& options) {
    check_box(system, box);
    if (system.unknowns() == 0) {
        std::vector<double> scratch;
        MultistartResult out;
        out.best_cost = system.cost({}, scratch);
        out.success = out.best_cost < options.success_cost;
        out.starts_run = 1;
        return out;
    }
    MultistartResult total;
    total.best_cost = std::numeric_limits<double>::infinity();
    merge_into(total, run_block(system, box, options, 0, options.starts, false));
    return total;
}

MultistartResult multistart_parallel(const ResidualSystem& system, const SearchBox& box,
                                     const MultistartOptions& options) {
    check_box(system, box);
    if (system.unknowns() == 0) return multistart_serial(system, box, options);
#ifdef _OPENMP
    const std::size_t block = static_cast<std::size_t>(std::max(1, omp_get_max_threads())) * 2;
#else
    const std::size_t block = 4;
#endif
    MultistartResult total;
    total.best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t begin = 0; begin < options.starts; begin += block) {
        const std::size_t end = std::min(options.starts, begin + block);
        const MultistartResult part = run_block(system, box, options, begin, end, true);
        merge_into(total, part);
        if (part.success) {
            // the serial scan would have stopped at the same start
            total.starts_run = total.best_start + 1;
            break;
        }
    }
    return total;
}

} // namespace prange
