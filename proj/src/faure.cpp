#include "prange/faure.hpp"

#include "prange/error.hpp"

#include <cmath>

namespace prange {

namespace {

constexpr std::size_t kMaxDigits = 64;

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

} // namespace

bool SearchBox::finite() const {
    if (lo.size() != hi.size()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || hi[i] < lo[i]) return false;
    }
    return true;
}

std::uint32_t smallest_prime_at_least(std::uint32_t n) {
    while (!is_prime(n)) ++n;
    return n;
}

FaureSequence::FaureSequence(std::size_t dim)
    : dim_(dim), base_(smallest_prime_at_least(static_cast<std::uint32_t>(std::max<std::size_t>(dim, 2)))) {
    if (dim == 0) throw Error(ErrorCode::ConfigError, "Faure sequence needs dim >= 1");
    binomial_.assign(kMaxDigits, std::vector<std::uint32_t>(kMaxDigits, 0));
    for (std::size_t k = 0; k < kMaxDigits; ++k) {
        binomial_[k][0] = 1;
        for (std::size_t i = 1; i <= k; ++i) {
            binomial_[k][i] = (binomial_[k - 1][i - 1] + (i < k ? binomial_[k - 1][i] : 0)) % base_;
        }
    }
}

void FaureSequence::point(std::uint64_t index, std::span<double> out) const {
    std::uint32_t digits[kMaxDigits];
    std::size_t count = 0;
    for (std::uint64_t n = index; n > 0; n /= base_) digits[count++] = static_cast<std::uint32_t>(n % base_);

    const double inv_base = 1.0 / base_;
    for (std::size_t j = 0; j < dim_; ++j) {
        // powers of j mod base for the generator matrix entries C(k,i) j^(k-i)
        std::uint64_t jpow[kMaxDigits];
        jpow[0] = 1;
        for (std::size_t p = 1; p < count; ++p) jpow[p] = (jpow[p - 1] * (j % base_)) % base_;

        double x = 0.0;
        double scale = inv_base;
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t y = 0;
            for (std::size_t k = i; k < count; ++k) {
                y += static_cast<std::uint64_t>(binomial_[k][i]) * jpow[k - i] % base_ * digits[k];
            }
            x += static_cast<double>(y % base_) * scale;
            scale *= inv_base;
        }
        out[j] = x;
    }
}

std::vector<double> FaureSequence::point(std::uint64_t index) const {
    std::vector<double> out(dim_);
    point(index, out);
    return out;
}

void FaureSequence::point_in(std::uint64_t index, const SearchBox& box, std::span<double> out) const {
    point(index, out);
    for (std::size_t j = 0; j < dim_; ++j) out[j] = box.lo[j] + out[j] * box.width(j);
}

} // namespace prange
