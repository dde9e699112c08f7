#ifndef CAUCHYPROP_DFT_HPP
#define CAUCHYPROP_DFT_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace cauchyprop {

// Unitary DFT with centered mode ordering: slot p of the coefficient vector
// holds integer mode m = p - floor(n/2), so the modes run
// -floor(n/2) .. ceil(n/2)-1.
//
//   c_m = n^{-1/2} sum_j v_j exp(-2 pi i m j / n)
//   v_j = n^{-1/2} sum_m c_m exp(+2 pi i m j / n)
//
// Direct O(n^2) evaluation; the twiddle for index product r is taken from
// a table indexed by r mod n so every phase is computed from an exact
// integer angle.
namespace detail {

inline std::vector<complex> twiddles(std::size_t n, int sign) {
    std::vector<complex> w(n);
    const double step = 2.0 * M_PI / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double ang = step * static_cast<double>(r);
        w[r] = complex(std::cos(ang), sign * std::sin(ang));
    }
    return w;
}

inline std::size_t wrap(long m, std::size_t n) {
    const long nn = static_cast<long>(n);
    long r = m % nn;
    if (r < 0)
        r += nn;
    return static_cast<std::size_t>(r);
}

inline StateVector transform(std::span<const complex> in, int sign) {
    const std::size_t n = in.size();
    if (n < 2)
        throw std::invalid_argument("dft: length must be at least 2");
    const auto w = twiddles(n, sign);
    const long lowest = -static_cast<long>(n / 2);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    StateVector out(n);
    if (sign < 0) {
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t m = wrap(lowest + static_cast<long>(p), n);
            complex acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += in[j] * w[(m * j) % n];
            out[p] = acc * scale;
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            complex acc = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                const std::size_t m = wrap(lowest + static_cast<long>(p), n);
                acc += in[p] * w[(m * j) % n];
            }
            out[j] = acc * scale;
        }
    }
    return out;
}

} // namespace detail

/// Forward unitary transform: samples -> centered mode coefficients.
inline StateVector dft(std::span<const complex> values) {
    return detail::transform(values, -1);
}

/// Inverse of dft().
inline StateVector idft(std::span<const complex> coeffs) {
    return detail::transform(coeffs, +1);
}

} // namespace cauchyprop

#endif
