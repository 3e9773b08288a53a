#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prange {

/// Axis-aligned box used for sampling and for the swarm search space.
struct SearchBox {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    double width(std::size_t i) const { return hi[i] - lo[i]; }
    bool finite() const;
};

/// Faure low-discrepancy sequence in `dim` dimensions. The base is the
/// smallest prime >= max(dim, 2); coordinate j is the radical inverse of the
/// index digits after multiplication by the j-th power of the Pascal matrix
/// mod base, so coordinate 0 is the van der Corput sequence.
class FaureSequence {
public:
    explicit FaureSequence(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::uint32_t base() const { return base_; }

    /// Point number `index` in [0,1)^dim. Index 0 is the origin; callers
    /// usually start at 1.
    void point(std::uint64_t index, std::span<double> out) const;
    std::vector<double> point(std::uint64_t index) const;

    /// Point number `index` scaled into `box`.
    void point_in(std::uint64_t index, const SearchBox& box, std::span<double> out) const;

private:
    std::size_t dim_;
    std::uint32_t base_;
    std::vector<std::vector<std::uint32_t>> binomial_;  // C(k, i) mod base
};

std::uint32_t smallest_prime_at_least(std::uint32_t n);

} // namespace prange
