#ifndef CAUCHYPROP_PROPAGATOR_HPP
#define CAUCHYPROP_PROPAGATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "operator.hpp"
#include "series.hpp"

namespace cauchyprop {

/// d^N u / dt^N = G u with d^i u / dt^i (t0) = initial_data[i], i < N.
struct CauchyProblem {
    int order = 1;
    OperatorSpec op = ScalarOperator{complex(0.0)};
    double t0 = 0.0;
    std::vector<StateVector> initial_data;

    void validate() const {
        if (order < 1)
            throw std::invalid_argument("CauchyProblem: order must be >= 1");
        if (initial_data.size() != static_cast<std::size_t>(order))
            throw DimensionError("CauchyProblem: initial_data has " +
                                 std::to_string(initial_data.size()) + " entries, order is " +
                                 std::to_string(order));
        if (!std::isfinite(t0))
            throw NonFiniteError("CauchyProblem: non-finite t0");
        const std::size_t dim = dimension(op);
        for (std::size_t i = 0; i < initial_data.size(); ++i) {
            if (initial_data[i].size() != dim)
                throw DimensionError("CauchyProblem: initial_data[" + std::to_string(i) +
                                     "] does not match operator dimension");
            require_finite(initial_data[i], "CauchyProblem initial_data");
        }
    }
};

struct SolutionFrame {
    double t = 0.0;
    StateVector state;
    std::size_t terms_used = 0;
    double truncation_bound = 0.0;
    bool converged = true;
};

/// u(t) = sum_{j<N} (t-t0)^j Phi_{N,j}(t-t0, G) u_j.
///
/// Backward times (t < t0) are accepted; for dissipative G they amplify
/// rounding exponentially. At t == t0 the state is u_0 itself.
inline SolutionFrame propagate(const CauchyProblem& problem, double t,
                               const SeriesParams& params = {}) {
    problem.validate();
    params.validate();
    if (!std::isfinite(t))
        throw NonFiniteError("propagate: non-finite target time");

    SolutionFrame frame;
    frame.t = t;
    const double dt = t - problem.t0;
    if (dt == 0.0) {
        frame.state = problem.initial_data[0];
        frame.terms_used = 1;
        return frame;
    }

    const int N = problem.order;
    frame.state.assign(dimension(problem.op), complex(0.0));
    double dt_pow = 1.0;
    for (int j = 0; j < N; ++j, dt_pow *= dt) {
        const StateVector& u = problem.initial_data[j];
        if (std::all_of(u.begin(), u.end(), [](const complex& z) { return z == complex(0.0); }))
            continue;
        // Tighten each inner sum so the weighted total still meets tol.
        SeriesParams inner = params;
        inner.tol = params.tol / (N * std::max(1.0, std::abs(dt_pow)));
        const PhiResult r = apply_phi(problem.op, N, j, dt, u, inner);
        axpy(dt_pow, r.value, frame.state);
        frame.terms_used = std::max(frame.terms_used, r.diagnostics.terms_used);
        frame.truncation_bound += std::abs(dt_pow) * r.diagnostics.truncation_bound;
        frame.converged = frame.converged && r.diagnostics.converged;
    }
    frame.converged = frame.converged &&
                      frame.truncation_bound <= params.tol * (1.0 + norm_inf(frame.state));
    return frame;
}

/// Second-order solve in the cosh / sinh form:
///   u = cosh(dt sqrt(s)) u_0 + [sinh(dt sqrt(s)) / sqrt(s)] u_1   per mode s.
/// Both factors are even in sqrt(s), so the principal root is as good as any.
/// The u_1 factor is summed as dt * sum (dt^2 s)^n / (2n+1)! near s = 0.
inline SolutionFrame propagate_order2_closed(const CauchyProblem& problem, double t,
                                             const SeriesParams& params = {}) {
    if (problem.order != 2)
        throw std::invalid_argument("propagate_order2_closed: order must be 2");
    problem.validate();
    params.validate();
    const bool fourier = is_fourier(problem.op);
    if (!fourier && !std::holds_alternative<ScalarOperator>(problem.op))
        throw std::invalid_argument(
            "propagate_order2_closed: operator must be a Fourier symbol or a scalar");

    SolutionFrame frame;
    frame.t = t;
    const double dt = t - problem.t0;
    if (dt == 0.0) {
        frame.state = problem.initial_data[0];
        frame.terms_used = 1;
        return frame;
    }

    auto mode_factors = [&](complex s, SeriesDiagnostics& d) {
        const complex arg = dt * std::sqrt(s);
        const complex c = std::cosh(arg);
        complex sh;
        if (std::abs(arg) <= 1.0)
            sh = dt * detail::sum_stride_series(
                          complex(1.0),
                          [&](const complex& term, double inv) { return term * (dt * dt * s) * inv; },
                          [](const complex& term) { return std::abs(term); },
                          std::abs(dt * dt * s), 2, 1, params, d, "propagate_order2_closed");
        else
            sh = std::sinh(arg) / std::sqrt(s);
        return std::pair{c, sh};
    };

    if (fourier) {
        const auto& f = std::get<FourierSymbol>(problem.op);
        StateVector c0 = dft(problem.initial_data[0]);
        const StateVector c1 = dft(problem.initial_data[1]);
        for (std::size_t p = 0; p < c0.size(); ++p) {
            SeriesDiagnostics d;
            const auto [ch, sh] = mode_factors(f.symbol()[p], d);
            c0[p] = (c0[p] == complex(0.0) ? complex(0.0) : ch * c0[p]) +
                    (c1[p] == complex(0.0) ? complex(0.0) : sh * c1[p]);
            frame.terms_used = std::max(frame.terms_used, d.terms_used);
            frame.converged = frame.converged && d.converged;
        }
        frame.state = idft(c0);
    } else {
        SeriesDiagnostics d;
        const auto [ch, sh] = mode_factors(std::get<ScalarOperator>(problem.op).value, d);
        frame.state = {ch * problem.initial_data[0][0] + sh * problem.initial_data[1][0]};
        frame.terms_used = d.terms_used;
        frame.converged = d.converged;
    }
    require_finite(frame.state, "propagate_order2_closed result");
    return frame;
}

/// One time differentiation of the solution, expressed on the initial data:
/// (u_0, ..., u_{N-1}) -> (u_1, ..., u_{N-1}, G u_0).
inline CauchyProblem differentiated(const CauchyProblem& problem) {
    CauchyProblem next = problem;
    std::rotate(next.initial_data.begin(), next.initial_data.begin() + 1, next.initial_data.end());
    next.initial_data.back() = apply(problem.op, problem.initial_data.front());
    return next;
}

/// (d^i u / dt^i)(t) for i = 0 .. N-1. At t == t0 these are the initial data.
inline std::vector<SolutionFrame> derivative_frames(const CauchyProblem& problem, double t,
                                                    const SeriesParams& params = {}) {
    problem.validate();
    std::vector<SolutionFrame> frames;
    frames.reserve(problem.order);
    frames.push_back(propagate(problem, t, params));
    if (problem.order == 1)
        return frames;
    if (t == problem.t0) {
        for (int i = 1; i < problem.order; ++i)
            frames.push_back(SolutionFrame{t, problem.initial_data[i], 1, 0.0, true});
        return frames;
    }
    CauchyProblem shifted = problem;
    for (int i = 1; i < problem.order; ++i) {
        shifted = differentiated(shifted);
        frames.push_back(propagate(shifted, t, params));
    }
    return frames;
}

/// Propagates over `steps` equal sub-intervals, rebuilding all N time
/// derivatives at each intermediate time. steps == 1 is plain propagate.
inline SolutionFrame substep_propagate_steps(const CauchyProblem& problem, double t,
                                             const SeriesParams& params, std::size_t steps) {
    if (steps == 0)
        throw std::invalid_argument("substep_propagate: need at least one step");
    problem.validate();
    const double span = t - problem.t0;
    CauchyProblem current = problem;
    SolutionFrame summary;
    summary.t = t;
    for (std::size_t s = 1; s < steps; ++s) {
        const double ts = problem.t0 + span * (static_cast<double>(s) / static_cast<double>(steps));
        auto frames = derivative_frames(current, ts, params);
        for (int i = 0; i < current.order; ++i) {
            summary.terms_used = std::max(summary.terms_used, frames[i].terms_used);
            summary.converged = summary.converged && frames[i].converged;
            current.initial_data[i] = std::move(frames[i].state);
        }
        summary.truncation_bound += frames[0].truncation_bound;
        current.t0 = ts;
    }
    SolutionFrame last = propagate(current, t, params);
    summary.state = std::move(last.state);
    summary.terms_used = std::max(summary.terms_used, last.terms_used);
    summary.truncation_bound += last.truncation_bound;
    summary.converged = summary.converged && last.converged;
    return summary;
}

/// Smallest equal sub-step count with |h| * norm(G)^(1/N) <= max_step_radius.
/// Fourier symbols are evaluated mode by mode and need a single step.
inline std::size_t substep_count(const CauchyProblem& problem, double t, double max_step_radius) {
    if (!(max_step_radius > 0.0))
        throw std::invalid_argument("substep_count: max_step_radius must be positive");
    if (is_fourier(problem.op))
        return 1;
    const double radius =
        std::abs(t - problem.t0) * std::pow(norm_estimate(problem.op), 1.0 / problem.order);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(radius / max_step_radius)));
}

inline SolutionFrame substep_propagate(const CauchyProblem& problem, double t,
                                       const SeriesParams& params, double max_step_radius) {
    return substep_propagate_steps(problem, t, params, substep_count(problem, t, max_step_radius));
}

} // namespace cauchyprop

#endif
