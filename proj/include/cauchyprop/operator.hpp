#ifndef CAUCHYPROP_OPERATOR_HPP
#define CAUCHYPROP_OPERATOR_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "dft.hpp"
#include "grid.hpp"

namespace cauchyprop {

/// Square complex matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix(std::size_t dim, std::vector<complex> entries)
        : dim_(dim), entries_(std::move(entries)) {
        if (dim_ == 0)
            throw std::invalid_argument("DenseMatrix: dimension must be positive");
        if (entries_.size() != dim_ * dim_)
            throw DimensionError("DenseMatrix: expected dim*dim entries");
        require_finite(entries_, "DenseMatrix");
    }

    static DenseMatrix diagonal(std::span<const complex> d) {
        std::vector<complex> e(d.size() * d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            e[i * d.size() + i] = d[i];
        return DenseMatrix(d.size(), std::move(e));
    }

    std::size_t dim() const noexcept { return dim_; }
    const complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
    const std::vector<complex>& entries() const noexcept { return entries_; }

private:
    std::size_t dim_;
    std::vector<complex> entries_;
};

/// Constant-coefficient operator acting diagonally on Fourier modes.
/// symbol[p] is the eigenvalue of mode grid.mode(p).
class FourierSymbol {
public:
    FourierSymbol(Grid grid, StateVector symbol) : grid_(grid), symbol_(std::move(symbol)) {
        if (symbol_.size() != grid_.size())
            throw DimensionError("FourierSymbol: symbol length must equal grid size");
        require_finite(symbol_, "FourierSymbol");
    }

    // coefficient * (i k)^power, with k the angular wavenumber of each mode.
    static FourierSymbol derivative(const Grid& grid, complex coefficient, int power) {
        if (power < 0)
            throw std::invalid_argument("FourierSymbol::derivative: power must be >= 0");
        StateVector s(grid.size());
        for (std::size_t p = 0; p < s.size(); ++p) {
            const complex ik(0.0, grid.wavenumber(grid.mode(p)));
            complex v = 1.0;
            for (int q = 0; q < power; ++q)
                v *= ik;
            s[p] = coefficient * v;
        }
        return FourierSymbol(grid, std::move(s));
    }

    const Grid& grid() const noexcept { return grid_; }
    const StateVector& symbol() const noexcept { return symbol_; }

private:
    Grid grid_;
    StateVector symbol_;
};

/// Periodic stencil convolution. Coefficients are centered (index (len-1)/2
/// multiplies the point itself) and already carry any 1/h^p scaling.
class FiniteDifference {
public:
    FiniteDifference(Grid grid, std::vector<double> stencil)
        : grid_(grid), stencil_(std::move(stencil)) {
        if (stencil_.empty() || stencil_.size() % 2 == 0)
            throw std::invalid_argument("FiniteDifference: stencil length must be odd");
        if (stencil_.size() > grid_.size())
            throw std::invalid_argument("FiniteDifference: stencil longer than grid");
        for (double c : stencil_)
            if (!std::isfinite(c))
                throw NonFiniteError("FiniteDifference: non-finite coefficient");
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& stencil() const noexcept { return stencil_; }
    std::size_t half_width() const noexcept { return stencil_.size() / 2; }

private:
    Grid grid_;
    std::vector<double> stencil_;
};

/// One-dimensional operator: multiplication by a complex constant.
struct ScalarOperator {
    complex value;
};

using OperatorSpec = std::variant<DenseMatrix, FourierSymbol, FiniteDifference, ScalarOperator>;

inline std::size_t dimension(const OperatorSpec& op) {
    return std::visit(
        [](const auto& o) -> std::size_t {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, DenseMatrix>)
                return o.dim();
            else if constexpr (std::is_same_v<T, ScalarOperator>)
                return 1;
            else
                return o.grid().size();
        },
        op);
}

inline std::optional<Grid> grid_of(const OperatorSpec& op) {
    if (const auto* f = std::get_if<FourierSymbol>(&op))
        return f->grid();
    if (const auto* s = std::get_if<FiniteDifference>(&op))
        return s->grid();
    return std::nullopt;
}

inline bool is_fourier(const OperatorSpec& op) { return std::holds_alternative<FourierSymbol>(op); }

namespace detail {

inline StateVector apply_unchecked(const DenseMatrix& m, std::span<const complex> v) {
    const std::size_t n = m.dim();
    StateVector out(n);
    for (std::size_t r = 0; r < n; ++r) {
        complex acc = 0.0;
        const complex* row = m.entries().data() + r * n;
        for (std::size_t c = 0; c < n; ++c)
            acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

inline StateVector apply_unchecked(const FourierSymbol& f, std::span<const complex> v) {
    StateVector c = dft(v);
    for (std::size_t p = 0; p < c.size(); ++p)
        c[p] *= f.symbol()[p];
    return idft(c);
}

inline StateVector apply_unchecked(const FiniteDifference& fd, std::span<const complex> v) {
    const std::size_t n = v.size();
    const std::size_t r = fd.half_width();
    const auto& s = fd.stencil();
    StateVector out(n);
    for (std::size_t i = 0; i < n; ++i) {
        complex acc = 0.0;
        for (std::size_t q = 0; q < s.size(); ++q)
            acc += s[q] * v[(i + n + q - r) % n];
        out[i] = acc;
    }
    return out;
}

inline StateVector apply_unchecked(const ScalarOperator& s, std::span<const complex> v) {
    return StateVector{s.value * v[0]};
}

struct apply_fn {
    StateVector operator()(const OperatorSpec& op, std::span<const complex> v) const {
        if (v.size() != dimension(op))
            throw DimensionError("apply: vector of length " + std::to_string(v.size()) +
                                 " for operator of dimension " + std::to_string(dimension(op)));
        require_finite(v, "apply");
        return std::visit([&](const auto& o) { return apply_unchecked(o, v); }, op);
    }

    GridFunction operator()(const OperatorSpec& op, const GridFunction& f) const {
        return GridFunction(f.grid(), (*this)(op, std::span<const complex>(f.values())));
    }
};

} // namespace detail

/// G * v. Throws DimensionError on size mismatch, NonFiniteError on NaN/Inf input.
/// A function object, so std::apply is never picked up through ADL on StateVector.
inline constexpr detail::apply_fn apply{};

/// Upper estimate of the induced operator norm; never below the spectral radius.
/// Dense, stencil and scalar report the infinity norm, Fourier the 2-norm
/// (max |symbol|, the transform being unitary).
inline double norm_estimate(const OperatorSpec& op) {
    return std::visit(
        [](const auto& o) -> double {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, DenseMatrix>) {
                double best = 0.0;
                for (std::size_t r = 0; r < o.dim(); ++r) {
                    double row = 0.0;
                    for (std::size_t c = 0; c < o.dim(); ++c)
                        row += std::abs(o(r, c));
                    best = std::max(best, row);
                }
                return best;
            } else if constexpr (std::is_same_v<T, FourierSymbol>) {
                return norm_inf(o.symbol());
            } else if constexpr (std::is_same_v<T, FiniteDifference>) {
                double s = 0.0;
                for (double c : o.stencil())
                    s += std::abs(c);
                return s;
            } else {
                return std::abs(o.value);
            }
        },
        op);
}

inline constexpr std::size_t default_dense_cap = 256;

/// Matrix whose column i is apply(op, e_i).
inline DenseMatrix to_dense(const OperatorSpec& op, std::size_t cap = default_dense_cap) {
    if (const auto* d = std::get_if<DenseMatrix>(&op))
        return *d;
    const std::size_t n = dimension(op);
    if (n > cap)
        throw DimensionError("to_dense: dimension " + std::to_string(n) + " exceeds cap " +
                             std::to_string(cap));
    std::vector<complex> e(n * n);
    StateVector unit(n);
    for (std::size_t c = 0; c < n; ++c) {
        unit[c] = 1.0;
        const StateVector col = apply(op, unit);
        for (std::size_t r = 0; r < n; ++r)
            e[r * n + c] = col[r];
        unit[c] = 0.0;
    }
    return DenseMatrix(n, std::move(e));
}

} // namespace cauchyprop

#endif
