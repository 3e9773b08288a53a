#include <doctest.h>

#include "prange/expr.hpp"
#include "prange/tape.hpp"

#include <cmath>
#include <random>

using namespace prange;

namespace {

std::vector<Expr> sample_outputs() {
    const Expr x = Expr::variable(0), y = Expr::variable(1), z = Expr::variable(2);
    const Expr shared = Expr::sqrt(Expr::power(x - y, 2) + Expr::power(z, 2));  // reused below
    return {shared - 5.0, shared * x + Expr::cos(z), Expr::acos(x / (Expr::power(x, 2) + 1.0)) - y,
            Expr::power(z, 3) / (Expr::power(y, 2) + 2.0)};
}

} // namespace

TEST_CASE("tape agrees with tree evaluation") {
    const auto outs = sample_outputs();
    const Tape tape(outs, 3);
    CHECK(tape.output_count() == 4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::vector<double> scratch, out(4);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        REQUIRE(tape.evaluate(x, out, scratch));
        double ss = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const double want = eval(outs[i], x);
            CHECK(out[i] == doctest::Approx(want).epsilon(1e-13));
            ss += want * want;
        }
        CHECK(tape.sum_of_squares(x, scratch) == doctest::Approx(ss).epsilon(1e-12));
    }
}

TEST_CASE("common subexpressions are merged") {
    const Expr x = Expr::variable(0);
    const Expr a = Expr::sqrt(Expr::power(x, 2) + 1.0);
    const Expr b = Expr::sqrt(Expr::power(x, 2) + 1.0);  // equal but not shared
    const std::vector<Expr> one{a};
    const std::vector<Expr> two{a, b};
    CHECK(Tape(two, 1).instruction_count() == Tape(one, 1).instruction_count());
}

TEST_CASE("domain failures poison instead of throwing") {
    const std::vector<Expr> outs{Expr::sqrt(Expr::variable(0)), Expr::variable(0)};
    const Tape tape(outs, 1);
    std::vector<double> scratch, out(2);
    CHECK_FALSE(tape.evaluate(std::vector<double>{-1.0}, out, scratch));
    CHECK(std::isnan(out[0]));
    CHECK(std::isinf(tape.sum_of_squares(std::vector<double>{-1.0}, scratch)));
}

TEST_CASE("parallel batch matches the serial reference bit for bit") {
    const auto outs = sample_outputs();
    const Tape tape(outs, 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const std::size_t rows = 5000;
    std::vector<double> pts(rows * 3);
    for (double& v : pts) v = u(rng);
    pts[7] = -1e9;  // a few rows hit the acos domain edge or not; either way both agree
    std::vector<double> a(rows), b(rows);
    sum_of_squares_batch_serial(tape, pts, a);
    sum_of_squares_batch_parallel(tape, pts, b);
    for (std::size_t i = 0; i < rows; ++i) {
        if (std::isnan(a[i])) CHECK(std::isnan(b[i]));
        else CHECK(a[i] == b[i]);
    }
}
