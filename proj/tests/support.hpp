#pragma once
// Shared helpers and independent oracles for the unit and acceptance tests.

#include "prange/error.hpp"
#include "prange/model.hpp"
#include "prange/ranges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace testing {

inline std::string model_path(const std::string& name) { return std::string(PRANGE_MODELS_DIR) + "/" + name; }

inline prange::ConstraintSystem load_model(const std::string& name) {
    return prange::load_system_file(model_path(name));
}

// Code of the prange::Error thrown by `f`, nothing if it returned.
template <class F>
std::optional<prange::ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const prange::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline std::string to_text(const std::vector<double>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "}";
}

inline double relative_error(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) / scale;
}

// Central difference with h = cbrt(eps) * max(|x|, 1).
inline double central_difference(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                                 std::size_t i) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(std::abs(x[i]), 1.0);
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    return (up - down) / (2.0 * h);
}

// Random trees over `vars` variables that stay in-domain on [0.5, 2]^vars:
// sqrt and acos only see arguments that cannot leave their domain.
inline prange::Expr random_tree(std::mt19937_64& rng, std::size_t vars, int depth) {
    using prange::Expr;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> val(0.5, 2.0);
    auto sub = [&] { return random_tree(rng, vars, depth - 1); };
    switch (pick(rng)) {
        case 0: return Expr::variable(rng() % vars);
        case 1: return Expr::constant(val(rng));
        case 2: return sub() + sub();
        case 3: return sub() - sub();
        case 4: return sub() * sub();
        case 5: {
            const Expr d = sub();
            return sub() / (Expr::power(d, 2) + 1.0);
        }
        case 6: return Expr::power(sub(), 1 + static_cast<int>(rng() % 3));
        case 7: return Expr::sqrt(Expr::power(sub(), 2) + 1.0);
        case 8: return Expr::cos(sub());
        default: {
            const Expr a = sub();
            return Expr::acos(0.5 * (a / Expr::sqrt(Expr::power(a, 2) + 1.0)));
        }
    }
}

// Radical inverse of n in base b.
inline double van_der_corput(std::uint64_t n, std::uint32_t b) {
    double v = 0.0;
    double scale = 1.0 / b;
    while (n > 0) {
        v += static_cast<double>(n % b) * scale;
        n /= b;
        scale /= b;
    }
    return v;
}

// Faure point by explicit Pascal-matrix powers: digits of coordinate j are
// P^j a mod b with P[r][c] = C(c, r).
inline std::vector<double> faure_point(std::uint64_t n, std::size_t dim, std::uint32_t b) {
    std::vector<std::uint64_t> digits;
    for (std::uint64_t k = n; k > 0; k /= b) digits.push_back(k % b);
    const std::size_t L = digits.size();
    auto binom = [](std::uint64_t nn, std::uint64_t kk) {
        std::uint64_t r = 1;
        for (std::uint64_t i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
        return r;
    };
    std::vector<double> out(dim);
    std::vector<std::uint64_t> a = digits;
    for (std::size_t j = 0; j < dim; ++j) {
        double v = 0.0;
        double scale = 1.0 / b;
        for (std::size_t r = 0; r < L; ++r) {
            v += static_cast<double>(a[r]) * scale;
            scale /= b;
        }
        out[j] = v;
        // a <- P a mod b
        std::vector<std::uint64_t> next(L, 0);
        for (std::size_t r = 0; r < L; ++r) {
            for (std::size_t c = r; c < L; ++c) next[r] = (next[r] + binom(c, r) % b * a[c]) % b;
        }
        a = next;
    }
    return out;
}

// Brute-force interval oracle: classify p = 0, step, 2 step, ... up to `hi`
// with `feasible` and group consecutive feasible samples. Each interval is
// [first feasible sample, last feasible sample].
struct SweepInterval {
    double lo;
    double hi;
};

inline std::vector<SweepInterval> sweep(const std::function<bool(double)>& feasible, double hi, double step) {
    std::vector<SweepInterval> out;
    bool in = false;
    const auto count = static_cast<std::size_t>(std::floor(hi / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        const double p = static_cast<double>(k) * step;
        const bool ok = feasible(p);
        if (ok && !in) out.push_back({p, p});
        if (ok) out.back().hi = p;
        in = ok;
    }
    return out;
}

// Does the sweep reproduce the computed intervals within one step? The
// computed set is clipped to [0, hi] first.
inline bool sweep_matches(const std::vector<SweepInterval>& s, const prange::ParameterRange& r, double hi,
                          double step) {
    std::vector<SweepInterval> expect;
    for (const auto& i : r.intervals) {
        if (i.lo.value > hi) continue;
        expect.push_back({i.lo.value, i.hi.infinite ? hi : std::min(i.hi.value, hi)});
    }
    if (expect.size() != s.size()) return false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (std::abs(s[k].lo - expect[k].lo) > step + 1e-9) return false;
        if (std::abs(s[k].hi - expect[k].hi) > step + 1e-9) return false;
    }
    return true;
}

} // namespace testing
