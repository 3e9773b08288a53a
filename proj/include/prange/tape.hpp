#pragma once

#include "prange/expr.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prange {

/// A set of expressions flattened into a straight-line program with common
/// subexpressions merged. This is what the hot loops evaluate; eval() on the
/// tree stays the reference.
///
/// Domain failures do not throw here: they poison the affected outputs with
/// NaN and evaluate() reports false.
class Tape {
public:
    Tape() = default;
    Tape(std::span<const Expr> outputs, std::size_t input_count);

    std::size_t input_count() const { return input_count_; }
    std::size_t output_count() const { return outputs_.size(); }
    std::size_t instruction_count() const { return code_.size(); }

    /// `scratch` is resized on demand; pass one per thread.
    bool evaluate(std::span<const double> x, std::span<double> out, std::vector<double>& scratch) const;

    /// Sum of squared outputs, or +inf when any output is not finite.
    double sum_of_squares(std::span<const double> x, std::vector<double>& scratch) const;

private:
    struct Instruction {
        Op op;
        int exponent;
        std::uint32_t a;
        std::uint32_t b;
        double value;
    };

    std::vector<Instruction> code_;
    std::vector<std::uint32_t> outputs_;
    std::size_t input_count_ = 0;
};

// ---------------------------------------------------------------------------
// Batch kernels. `points` is row-major with one point of `tape.input_count()`
// coordinates per row; `out[i]` receives the sum of squared outputs at row i.
// The serial version is the reference the OpenMP version is tested against.

void sum_of_squares_batch_serial(const Tape& tape, std::span<const double> points, std::span<double> out);
void sum_of_squares_batch_parallel(const Tape& tape, std::span<const double> points, std::span<double> out);

inline void sum_of_squares_batch(const Tape& tape, std::span<const double> points, std::span<double> out,
                                 bool parallel) {
    if (parallel) sum_of_squares_batch_parallel(tape, points, out);
    else sum_of_squares_batch_serial(tape, points, out);
}

} // namespace prange
