#ifndef CAUCHYPROP_ORACLES_HPP
#define CAUCHYPROP_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "dft.hpp"
#include "grid.hpp"
#include "operator.hpp"
#include "propagator.hpp"

// Reference solutions that do not go through the propagator series.
namespace cauchyprop::oracles {

/// Block i holds d^i u / dt^i.
struct CompanionState {
    std::vector<StateVector> blocks;
    double t = 0.0;
};

namespace detail {

// y_i' = y_{i+1} for i < N-1, y_{N-1}' = G y_0.
inline std::vector<StateVector> companion_rhs(const OperatorSpec& op,
                                              const std::vector<StateVector>& y) {
    std::vector<StateVector> d(y.size());
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        d[i] = y[i + 1];
    d.back() = apply(op, y.front());
    return d;
}

inline std::vector<StateVector> offset(const std::vector<StateVector>& y,
                                       const std::vector<StateVector>& k, double h) {
    std::vector<StateVector> out = y;
    for (std::size_t i = 0; i < y.size(); ++i)
        axpy(h, k[i], out[i]);
    return out;
}

} // namespace detail

/// Classical fixed-step RK4 on the companion first-order system; returns block 0.
inline StateVector companion_rk4(const CauchyProblem& problem, double t, std::size_t steps) {
    problem.validate();
    if (steps == 0)
        throw std::invalid_argument("companion_rk4: steps must be >= 1");
    CompanionState s{problem.initial_data, problem.t0};
    const double h = (t - problem.t0) / static_cast<double>(steps);
    for (std::size_t step = 0; step < steps; ++step) {
        const auto k1 = detail::companion_rhs(problem.op, s.blocks);
        const auto k2 = detail::companion_rhs(problem.op, detail::offset(s.blocks, k1, h / 2));
        const auto k3 = detail::companion_rhs(problem.op, detail::offset(s.blocks, k2, h / 2));
        const auto k4 = detail::companion_rhs(problem.op, detail::offset(s.blocks, k3, h));
        for (std::size_t i = 0; i < s.blocks.size(); ++i) {
            for (std::size_t r = 0; r < s.blocks[i].size(); ++r)
                s.blocks[i][r] += h / 6.0 * (k1[i][r] + 2.0 * k2[i][r] + 2.0 * k3[i][r] + k4[i][r]);
            if (!all_finite(s.blocks[i]))
                throw NonFiniteError("companion_rk4: non-finite state at step " +
                                     std::to_string(step + 1));
        }
        s.t = problem.t0 + static_cast<double>(step + 1) * h;
    }
    return s.blocks.front();
}

/// f(x + a), by multiplying mode m by exp(i k_m a). Exact for band-limited f.
inline GridFunction translate(const GridFunction& f, double a) {
    if (!std::isfinite(a))
        throw NonFiniteError("translate: non-finite shift");
    if (a == 0.0)
        return f;
    const Grid& g = f.grid();
    StateVector c = dft(f.values());
    for (std::size_t p = 0; p < c.size(); ++p)
        c[p] *= std::polar(1.0, g.wavenumber(g.mode(p)) * a);
    return GridFunction(g, idft(c));
}

/// Periodic antiderivative of the zero-mean part of g (mode 0 dropped).
inline GridFunction spectral_antiderivative(const GridFunction& g) {
    const Grid& grid = g.grid();
    StateVector c = dft(g.values());
    for (std::size_t p = 0; p < c.size(); ++p) {
        const long m = grid.mode(p);
        c[p] = m == 0 ? complex(0.0) : c[p] / complex(0.0, grid.wavenumber(m));
    }
    return GridFunction(grid, idft(c));
}

/// u(x, t0+dt) for u_tt = v^2 u_xx, u = f and u_t = g at t0:
///   (f(x+vdt) + f(x-vdt))/2 + (P(x+vdt) - P(x-vdt))/(2v) + mean(g) dt
/// with P the spectral antiderivative of g minus its mean.
inline GridFunction dalembert(const GridFunction& f, const GridFunction& g, double v, double dt) {
    if (!(f.grid() == g.grid()))
        throw DimensionError("dalembert: f and g live on different grids");
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("dalembert: speed must be positive");
    if (dt == 0.0)
        return f;
    const double shift = v * dt;
    const GridFunction fp = translate(f, shift);
    const GridFunction fm = translate(f, -shift);
    const GridFunction prim = spectral_antiderivative(g);
    const GridFunction pp = translate(prim, shift);
    const GridFunction pm = translate(prim, -shift);
    complex mean = 0.0;
    for (const auto& z : g.values())
        mean += z;
    mean /= static_cast<double>(g.size());

    StateVector u(f.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = 0.5 * (fp[i] + fm[i]) + (pp[i] - pm[i]) / (2.0 * v) + mean * dt;
    return GridFunction(f.grid(), std::move(u));
}

/// exp(-D k^2 dt) sin(k x) sampled on the grid.
inline GridFunction heat_eigen_exact(long k, double diffusivity, double dt, const Grid& grid) {
    if (2 * std::labs(k) >= static_cast<long>(grid.size()))
        throw std::invalid_argument("heat_eigen_exact: mode " + std::to_string(k) +
                                    " aliases on a grid of " + std::to_string(grid.size()) +
                                    " points");
    const double kk = static_cast<double>(k);
    const double amp = dt == 0.0 ? 1.0 : std::exp(-diffusivity * kk * kk * dt);
    return GridFunction::sample(grid, [&](double x) { return amp * std::sin(kk * x); });
}

} // namespace cauchyprop::oracles

#endif
