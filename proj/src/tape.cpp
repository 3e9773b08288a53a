#include "prange/tape.hpp"

#include "prange/error.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prange {

namespace {

struct Key {
    Op op;
    int exponent;
    std::uint32_t a;
    std::uint32_t b;
    std::uint64_t bits;

    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.op) * 0x9E3779B97F4A7C15ull;
        h ^= (static_cast<std::uint64_t>(k.a) << 32 | k.b) + 0x7F4A7C15ull + (h << 6) + (h >> 2);
        h ^= k.bits + 0x85EBCA6Bull + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.exponent) + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

Tape::Tape(std::span<const Expr> outputs, std::size_t input_count) : input_count_(input_count) {
    std::unordered_map<const Expr::Node*, std::uint32_t> by_node;
    std::unordered_map<Key, std::uint32_t, KeyHash> by_key;

    auto emit = [&](const Key& key, double value) -> std::uint32_t {
        if (auto it = by_key.find(key); it != by_key.end()) return it->second;
        const auto slot = static_cast<std::uint32_t>(code_.size());
        code_.push_back({key.op, key.exponent, key.a, key.b, value});
        by_key.emplace(key, slot);
        return slot;
    };

    auto compile = [&](auto& self, const Expr& e) -> std::uint32_t {
        if (auto it = by_node.find(e.id()); it != by_node.end()) return it->second;
        std::uint32_t slot = 0;
        switch (e.op()) {
            case Op::Constant:
                slot = emit({Op::Constant, 0, 0, 0, std::bit_cast<std::uint64_t>(e.value())}, e.value());
                break;
            case Op::Variable:
                if (e.index() >= input_count_) {
                    throw Error(ErrorCode::Precondition, "tape input x" + std::to_string(e.index()) +
                                                             " outside declared input count");
                }
                slot = emit({Op::Variable, 0, static_cast<std::uint32_t>(e.index()), 0, 0}, 0.0);
                break;
            default: {
                const std::uint32_t a = self(self, e.child(0));
                const std::uint32_t b = e.arity() == 2 ? self(self, e.child(1)) : 0;
                const int k = e.op() == Op::Power ? e.exponent() : 0;
                slot = emit({e.op(), k, a, b, 0}, 0.0);
            }
        }
        by_node.emplace(e.id(), slot);
        return slot;
    };

    outputs_.reserve(outputs.size());
    for (const Expr& e : outputs) outputs_.push_back(compile(compile, e));
}

bool Tape::evaluate(std::span<const double> x, std::span<double> out, std::vector<double>& r) const {
    if (r.size() < code_.size()) r.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instruction& in = code_[i];
        switch (in.op) {
            case Op::Constant: r[i] = in.value; break;
            case Op::Variable: r[i] = x[in.a]; break;
            case Op::Negate: r[i] = -r[in.a]; break;
            case Op::Add: r[i] = r[in.a] + r[in.b]; break;
            case Op::Subtract: r[i] = r[in.a] - r[in.b]; break;
            case Op::Multiply: r[i] = r[in.a] * r[in.b]; break;
            case Op::Divide: r[i] = r[in.b] == 0.0 ? kNaN : r[in.a] / r[in.b]; break;
            case Op::Power: {
                const double a = r[in.a];
                r[i] = in.exponent == 2 ? a * a : std::pow(a, in.exponent);
                break;
            }
            case Op::Sqrt: r[i] = r[in.a] < 0.0 ? kNaN : std::sqrt(r[in.a]); break;
            case Op::Cos: r[i] = std::cos(r[in.a]); break;
            case Op::Acos: {
                const double a = r[in.a];
                r[i] = (a < -1.0 || a > 1.0) ? kNaN : std::acos(a);
                break;
            }
        }
    }
    bool ok = true;
    for (std::size_t k = 0; k < outputs_.size(); ++k) {
        out[k] = r[outputs_[k]];
        ok = ok && std::isfinite(out[k]);
    }
    return ok;
}

double Tape::sum_of_squares(std::span<const double> x, std::vector<double>& scratch) const {
    // outputs live at the front of scratch's tail; reuse a second buffer region
    const std::size_t n = outputs_.size();
    if (scratch.size() < code_.size() + n) scratch.resize(code_.size() + n);
    std::span<double> out(scratch.data() + code_.size(), n);
    std::vector<double>& regs = scratch;
    // evaluate() only touches the first code_.size() registers
    if (!evaluate(x, out, regs)) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double v : out) s += v * v;
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

void sum_of_squares_batch_serial(const Tape& tape, std::span<const double> points, std::span<double> out) {
    const std::size_t dim = tape.input_count();
    std::vector<double> scratch;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = tape.sum_of_squares(points.subspan(i * dim, dim), scratch);
    }
}

void sum_of_squares_batch_parallel(const Tape& tape, std::span<const double> points, std::span<double> out) {
    const std::size_t dim = tape.input_count();
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto row = static_cast<std::size_t>(i);
            out[row] = tape.sum_of_squares(points.subspan(row * dim, dim), scratch);
        }
    }
}

} // namespace prange
