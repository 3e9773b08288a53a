// Serial reference vs OpenMP versions of the two hot kernels: the batch
// merit evaluation of a swarm and multistart least squares.

#include "prange/lagrange.hpp"
#include "prange/least_squares.hpp"
#include "prange/model.hpp"
#include "prange/separation.hpp"
#include "prange/tape.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

using namespace prange;

namespace {

// Lagrange merit of the triangle's third side at d1=10, d2=20.
const MeritFunction& triangle_merit() {
    static const MeritFunction h = [] {
        const ConstraintSystem sys = load_system_file(std::string(PRANGE_MODELS_DIR) + "/triangle.json");
        const SeparatedFunction sf = separate(sys, "d3", {{"d1", 10.0}, {"d2", 20.0}}, {});
        return build_merit(build_lagrange(sf), lagrange_box(sf));
    }();
    return h;
}

std::vector<double> random_points(const SearchBox& box, std::size_t n) {
    std::mt19937_64 rng(7);
    std::vector<double> pts(n * box.dim());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < box.dim(); ++j) {
            std::uniform_real_distribution<double> U(box.lo[j], box.hi[j]);
            pts[i * box.dim() + j] = U(rng);
        }
    }
    return pts;
}

void batch_merit(benchmark::State& state, bool parallel) {
    const MeritFunction& h = triangle_merit();
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::vector<double> pts = random_points(h.box(), n);
    std::vector<double> out(n);
    for (auto _ : state) {
        sum_of_squares_batch(h.tape(), pts, out, parallel);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

// No root anywhere, so every start runs to completion.
void multistart_kernel(benchmark::State& state, bool parallel) {
    const Expr x = Expr::variable(0), y = Expr::variable(1);
    const ResidualSystem sys({Expr::power(x, 2) + Expr::power(y, 2) + 1.0, x - y}, 2);
    const SearchBox box{{-10.0, -10.0}, {10.0, 10.0}};
    MultistartOptions opt;
    opt.starts = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        const MultistartResult r = multistart(sys, box, opt, parallel);
        benchmark::DoNotOptimize(r.best_cost);
    }
}

} // namespace

BENCHMARK_CAPTURE(batch_merit, serial, false)->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(batch_merit, openmp, true)->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(multistart_kernel, serial, false)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(multistart_kernel, openmp, true)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
