#ifndef CAUCHYPROP_GRID_HPP
#define CAUCHYPROP_GRID_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cauchyprop {

using complex = std::complex<double>;
using StateVector = std::vector<complex>;

/// Uniform periodic grid on [a, b) with n points; point i sits at a + i*h.
class Grid {
public:
    Grid(std::size_t n, double a, double b) : n_(n), a_(a), b_(b) {
        if (n < 2)
            throw std::invalid_argument("Grid: need at least 2 points");
        if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
            throw std::invalid_argument("Grid: require finite a < b");
    }

    std::size_t size() const noexcept { return n_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double length() const noexcept { return b_ - a_; }
    double spacing() const noexcept { return (b_ - a_) / static_cast<double>(n_); }
    double point(std::size_t i) const noexcept { return a_ + static_cast<double>(i) * spacing(); }

    // Integer Fourier modes run from lowest_mode() to lowest_mode() + n - 1.
    long lowest_mode() const noexcept { return -static_cast<long>(n_ / 2); }
    long mode(std::size_t slot) const noexcept { return lowest_mode() + static_cast<long>(slot); }

    // Angular wavenumber of integer mode m on this interval.
    double wavenumber(long m) const noexcept {
        return 2.0 * M_PI * static_cast<double>(m) / length();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t n_;
    double a_;
    double b_;
};

inline bool all_finite(std::span<const complex> v) {
    return std::all_of(v.begin(), v.end(), [](const complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

inline void require_finite(std::span<const complex> v, const char* where) {
    if (!all_finite(v))
        throw NonFiniteError(std::string(where) + ": non-finite entry");
}

/// Complex samples of a function on a Grid.
class GridFunction {
public:
    GridFunction(Grid grid, StateVector values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw DimensionError("GridFunction: value count does not match grid size");
        require_finite(values_, "GridFunction");
    }

    explicit GridFunction(Grid grid) : grid_(grid), values_(grid.size()) {}

    template <class F>
    static GridFunction sample(const Grid& grid, F&& f) {
        StateVector v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = complex(f(grid.point(i)));
        return GridFunction(grid, std::move(v));
    }

    const Grid& grid() const noexcept { return grid_; }
    const StateVector& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const complex& operator[](std::size_t i) const { return values_[i]; }

private:
    Grid grid_;
    StateVector values_;
};

inline double norm_inf(std::span<const complex> v) {
    double m = 0.0;
    for (const auto& z : v)
        m = std::max(m, std::abs(z));
    return m;
}

inline double norm_2(std::span<const complex> v) {
    double s = 0.0;
    for (const auto& z : v)
        s += std::norm(z);
    return std::sqrt(s);
}

inline double max_abs_diff(std::span<const complex> x, std::span<const complex> y) {
    if (x.size() != y.size())
        throw DimensionError("max_abs_diff: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

// y += alpha * x
inline void axpy(complex alpha, std::span<const complex> x, std::span<complex> y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += alpha * x[i];
}

} // namespace cauchyprop

#endif
