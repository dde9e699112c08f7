#ifndef CAUCHYPROP_SERIES_HPP
#define CAUCHYPROP_SERIES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

#include "dft.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "operator.hpp"

namespace cauchyprop {

/// Stopping rule and refusal threshold for direct series summation.
struct SeriesParams {
    double tol = 1e-14;
    std::size_t max_terms = 400;
    // Largest |dt| * norm_estimate(G)^(1/N) accepted before summation is refused.
    double safety_radius = 30.0;
    // When false, hitting max_terms returns the partial sum flagged
    // converged = false instead of throwing SeriesNotConverged.
    bool throw_on_nonconvergence = true;

    void validate() const {
        if (!(tol > 0.0 && tol < 1.0))
            throw std::invalid_argument("SeriesParams: tol must lie in (0, 1)");
        if (max_terms < 4)
            throw std::invalid_argument("SeriesParams: max_terms must be at least 4");
        if (!(safety_radius > 0.0))
            throw std::invalid_argument("SeriesParams: safety_radius must be positive");
    }
};

struct SeriesDiagnostics {
    std::size_t terms_used = 0;
    double truncation_bound = 0.0;
    bool converged = true;
};

/// Thrown when max_terms is reached first; carries the partial sum.
class SeriesNotConverged : public std::runtime_error {
public:
    SeriesNotConverged(const std::string& what, StateVector partial, SeriesDiagnostics diag)
        : std::runtime_error(what), partial_(std::move(partial)), diag_(diag) {}

    const StateVector& partial() const noexcept { return partial_; }
    const SeriesDiagnostics& diagnostics() const noexcept { return diag_; }

private:
    StateVector partial_;
    SeriesDiagnostics diag_;
};

namespace detail {

// prod_{i=1..N} (N n + j + i): ratio of consecutive stride-N factorials.
inline double stride_factor(int order, int j, std::size_t n) {
    double p = 1.0;
    const double base = static_cast<double>(order) * static_cast<double>(n) + j;
    for (int i = 1; i <= order; ++i)
        p *= base + i;
    return p;
}

inline complex ipow(complex z, int k) {
    complex r = 1.0;
    for (int i = 0; i < k; ++i)
        r *= z;
    return r;
}

inline double inv_factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i)
        f *= i;
    return 1.0 / f;
}

inline void check_order(int order, int j, const char* where) {
    if (order < 1)
        throw std::invalid_argument(std::string(where) + ": order must be >= 1");
    if (j < 0 || j >= order)
        throw std::invalid_argument(std::string(where) + ": index j must lie in [0, order)");
}

// Incremental summation shared by the scalar and operator paths.
//   term_0 = first,  term_{n+1} = step(term_n) / stride_factor(n)
// where step multiplies by x (scalar) or applies x*G (operator), and
// growth = |x| * norm(G) bounds the step's magnification.
// Stops after two consecutive terms with |term| <= tol (1 + |sum|), once the
// geometric tail ratio rho is below one so the tail bound is meaningful.
template <class Vec, class Step, class Norm>
Vec sum_stride_series(Vec first, Step&& step, Norm&& norm, double growth, int order, int j,
                      const SeriesParams& params, SeriesDiagnostics& diag, const char* where) {
    Vec sum = first;
    Vec term = std::move(first);
    int small_run = 0;
    for (std::size_t n = 0;; ++n) {
        const double sum_norm = norm(sum);
        const double term_norm = norm(term);
        const double rho = growth / stride_factor(order, j, n);
        small_run = term_norm <= params.tol * (1.0 + sum_norm) ? small_run + 1 : 0;
        if (small_run >= 2 && rho < 1.0) {
            diag.terms_used = n + 1;
            diag.truncation_bound = term_norm * rho / (1.0 - rho);
            diag.converged = diag.truncation_bound <= params.tol * (1.0 + sum_norm);
            return sum;
        }
        if (n + 1 >= params.max_terms) {
            diag.terms_used = n + 1;
            diag.truncation_bound = rho < 1.0 ? term_norm * rho / (1.0 - rho)
                                              : std::numeric_limits<double>::infinity();
            diag.converged = false;
            if (!params.throw_on_nonconvergence)
                return sum;
            if constexpr (std::is_same_v<Vec, complex>)
                throw SeriesNotConverged(std::string(where) + ": no convergence within max_terms",
                                         StateVector{sum}, diag);
            else
                throw SeriesNotConverged(std::string(where) + ": no convergence within max_terms",
                                         sum, diag);
        }
        term = step(term, 1.0 / stride_factor(order, j, n));
        if constexpr (std::is_same_v<Vec, complex>)
            sum += term;
        else
            axpy(1.0, term, sum);
    }
}

// exp(2 pi i k / N), exact on the axes.
inline complex unit_root(int k, int order) {
    k %= order;
    if ((4 * k) % order == 0) {
        switch ((4 * k) / order) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    const double ang = 2.0 * M_PI * k / order;
    return {std::cos(ang), std::sin(ang)};
}

// H_{N,j}(z) = (1/N) sum_k w^{-jk} exp(w^k z), w = exp(2 pi i / N).
inline complex hyperbolic_by_roots(int order, int j, complex z) {
    complex acc = 0.0;
    for (int k = 0; k < order; ++k) {
        const complex w = unit_root(k, order);
        acc += std::conj(unit_root(j * k, order)) * std::exp(w * z);
    }
    return acc / static_cast<double>(order);
}

// Arguments with modulus at most this are summed directly; larger ones go
// through the root-of-unity combination of exponentials.
inline constexpr double series_disk = 1.0;

} // namespace detail

inline constexpr double scalar_h_argument_limit = 700.0;

/// Generalized hyperbolic function H_{N,j}(z) = sum_{n>=0} z^{Nn+j} / (Nn+j)!.
/// H_{1,0} = exp, H_{2,0} = cosh, H_{2,1} = sinh.
inline complex scalar_h(int order, int j, complex z, const SeriesParams& params,
                        SeriesDiagnostics* diag_out = nullptr) {
    detail::check_order(order, j, "scalar_h");
    params.validate();
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NonFiniteError("scalar_h: non-finite argument");
    if (std::abs(z) > scalar_h_argument_limit)
        throw std::out_of_range("scalar_h: |z| above " + std::to_string(scalar_h_argument_limit));

    SeriesDiagnostics diag;
    complex value;
    if (std::abs(z) <= detail::series_disk) {
        const complex zn = detail::ipow(z, order);
        const complex first = detail::ipow(z, j) * detail::inv_factorial(j);
        value = detail::sum_stride_series(
            first, [&](const complex& t, double inv) { return t * zn * inv; },
            [](const complex& t) { return std::abs(t); }, std::abs(zn), order, j, params, diag,
            "scalar_h");
    } else {
        value = detail::hyperbolic_by_roots(order, j, z);
        diag.terms_used = static_cast<std::size_t>(order);
    }
    if (diag_out)
        *diag_out = diag;
    return value;
}

inline complex scalar_h(int order, int j, complex z) { return scalar_h(order, j, z, SeriesParams{}); }

/// Phi_{N,j}(w) = sum_{n>=0} w^n / (Nn+j)!, so that the propagator of mode
/// eigenvalue s over dt is Phi_{N,j}(dt^N s). Outside the unit disk any
/// N-th root r of w gives Phi = r^{-j} H_{N,j}(r); the choice of root
/// cancels out, so no branch convention is involved.
inline complex phi_scalar(int order, int j, complex w, const SeriesParams& params,
                          SeriesDiagnostics* diag_out = nullptr) {
    detail::check_order(order, j, "phi_scalar");
    SeriesDiagnostics diag;
    complex value;
    const double r = std::pow(std::abs(w), 1.0 / order);
    if (r <= detail::series_disk) {
        value = detail::sum_stride_series(
            complex(detail::inv_factorial(j)),
            [&](const complex& t, double inv) { return t * w * inv; },
            [](const complex& t) { return std::abs(t); }, std::abs(w), order, j, params, diag,
            "phi_scalar");
    } else {
        const complex root = order == 1 ? w : std::polar(r, std::arg(w) / order);
        value = detail::hyperbolic_by_roots(order, j, root) / detail::ipow(root, j);
        diag.terms_used = static_cast<std::size_t>(order);
    }
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw NonFiniteError("phi_scalar: value overflowed");
    if (diag_out)
        *diag_out = diag;
    return value;
}

struct PhiResult {
    StateVector value;
    SeriesDiagnostics diagnostics;
};

namespace detail {

inline PhiResult apply_phi_fourier(const FourierSymbol& f, int order, int j, double dt,
                                   std::span<const complex> v, const SeriesParams& params) {
    StateVector coeffs = dft(v);
    const double dtn = std::pow(dt, order);
    const double scale = 1.0 / std::sqrt(static_cast<double>(coeffs.size()));
    PhiResult out;
    double bound = 0.0;
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
        if (coeffs[p] == complex(0.0))
            continue;
        SeriesDiagnostics d;
        coeffs[p] *= phi_scalar(order, j, dtn * f.symbol()[p], params, &d);
        bound += std::abs(coeffs[p]) * d.truncation_bound * scale;
        out.diagnostics.terms_used = std::max(out.diagnostics.terms_used, d.terms_used);
        out.diagnostics.converged = out.diagnostics.converged && d.converged;
    }
    out.value = idft(coeffs);
    out.diagnostics.truncation_bound = bound;
    return out;
}

} // namespace detail

/// Phi_{N,j}(dt, G) v = sum_{n>=0} (dt^N G)^n v / (Nn+j)!.
///
/// Dense, stencil and scalar operators are summed term by term with integer
/// powers of G only; the call is refused with RadiusExceeded when
/// |dt| * norm_estimate(G)^(1/N) > params.safety_radius (sub-step instead).
/// Fourier symbols are diagonal, so each mode is evaluated as phi_scalar of
/// its eigenvalue and the radius guard does not apply.
inline PhiResult apply_phi(const OperatorSpec& op, int order, int j, double dt,
                           std::span<const complex> v, const SeriesParams& params) {
    detail::check_order(order, j, "apply_phi");
    params.validate();
    if (v.size() != dimension(op))
        throw DimensionError("apply_phi: state length does not match operator dimension");
    require_finite(v, "apply_phi");
    if (!std::isfinite(dt))
        throw NonFiniteError("apply_phi: non-finite dt");

    if (dt == 0.0) {
        PhiResult out{StateVector(v.begin(), v.end()), {1, 0.0, true}};
        if (j > 0)
            for (auto& z : out.value)
                z *= detail::inv_factorial(j);
        return out;
    }

    PhiResult out;
    if (const auto* f = std::get_if<FourierSymbol>(&op)) {
        out = detail::apply_phi_fourier(*f, order, j, dt, v, params);
    } else {
        const double norm = norm_estimate(op);
        const double radius = std::abs(dt) * std::pow(norm, 1.0 / order);
        if (radius > params.safety_radius)
            throw RadiusExceeded("apply_phi: |dt| * |G|^(1/N) = " + std::to_string(radius) +
                                     " exceeds safety radius " +
                                     std::to_string(params.safety_radius) +
                                     "; split the interval into sub-steps",
                                 radius, params.safety_radius);
        const double dtn = std::pow(dt, order);
        StateVector first(v.begin(), v.end());
        if (j > 0)
            for (auto& z : first)
                z *= detail::inv_factorial(j);
        out.value = detail::sum_stride_series(
            std::move(first),
            [&](const StateVector& t, double inv) {
                StateVector next = apply(op, t);
                for (auto& z : next)
                    z *= dtn * inv;
                return next;
            },
            [](const StateVector& t) { return norm_inf(t); }, std::abs(dtn) * norm, order, j,
            params, out.diagnostics, "apply_phi");
    }
    require_finite(out.value, "apply_phi result");
    return out;
}

} // namespace cauchyprop

#endif
