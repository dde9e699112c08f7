#include <cauchyprop/oracles.hpp>

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace cauchyprop;
using namespace cauchyprop::oracles;

namespace {

const Grid periodic64(64, 0.0, 2.0 * M_PI);

CauchyProblem scalar_problem(int order, complex g, std::vector<complex> data) {
    CauchyProblem p{order, ScalarOperator{g}, 0.0, {}};
    for (const auto& d : data)
        p.initial_data.push_back({d});
    return p;
}

GridFunction sample(const fixtures::BandLimited& f, const Grid& g) {
    return GridFunction::sample(g, [&](double x) { return f(x); });
}

// Composite Simpson, test-only quadrature.
template <class F>
double simpson(F&& f, double lo, double hi, int panels = 2000) {
    const double h = (hi - lo) / panels;
    double s = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

} // namespace

TEST(CompanionRk4, Examples) {
    EXPECT_NEAR(companion_rk4(scalar_problem(1, 1.0, {1.0}), 1.0, 1000)[0].real(), std::exp(1.0), 1e-11);
    EXPECT_NEAR(companion_rk4(scalar_problem(2, -1.0, {1.0, 0.0}), M_PI, 2000)[0].real(), -1.0, 1e-10);
    const double closed = (std::exp(1.0) + 2.0 * std::exp(-0.5) * std::cos(std::sqrt(3.0) / 2.0)) / 3.0;
    EXPECT_NEAR(companion_rk4(scalar_problem(3, 1.0, {1.0, 0.0, 0.0}), 1.0, 10000)[0].real(), closed,
                1e-12);
}

TEST(CompanionRk4, FourthOrderConvergence) {
    for (int N = 1; N <= 3; ++N) {
        const CauchyProblem p = scalar_problem(N, complex(-1.2, 0.3), std::vector<complex>(N, 1.0));
        const complex exact = propagate(p, 2.0).state[0];
        std::vector<double> errs;
        for (std::size_t steps : {10u, 20u, 40u, 80u})
            errs.push_back(std::abs(companion_rk4(p, 2.0, steps)[0] - exact));
        for (std::size_t i = 1; i < errs.size(); ++i) {
            const double order = std::log2(errs[i - 1] / errs[i]);
            EXPECT_NEAR(order, 4.0, 0.3) << "N=" << N;
        }
    }
}

TEST(CompanionRk4, Errors) {
    EXPECT_THROW(companion_rk4(scalar_problem(1, 1.0, {1.0}), 1.0, 0), std::invalid_argument);
    try {
        companion_rk4(scalar_problem(1, 1e90, {1.0}), 1.0, 1);
        FAIL() << "expected overflow";
    } catch (const NonFiniteError& e) {
        EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
    }
}

TEST(Translate, ZeroShiftIsIdentity) {
    std::mt19937_64 rng(1);
    const GridFunction f(periodic64, fixtures::random_vector(rng, 64));
    EXPECT_LE(max_abs_diff(translate(f, 0.0).values(), f.values()), 1e-13);
}

TEST(Translate, SineToCosine) {
    const auto f = GridFunction::sample(periodic64, [](double x) { return std::sin(x); });
    const GridFunction g = translate(f, M_PI / 2);
    for (std::size_t i = 0; i < periodic64.size(); ++i)
        EXPECT_NEAR(std::abs(g[i] - std::cos(periodic64.point(i))), 0.0, 1e-12);
}

TEST(Translate, InverseShiftAndExactness) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> shift(-5.0, 5.0);
    const Grid g(48, -1.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto bl = fixtures::random_band_limited(rng, 8, g);
        const GridFunction f = sample(bl, g);
        const double a = shift(rng);
        const GridFunction moved = translate(f, a);
        EXPECT_LE(max_abs_diff(translate(moved, -a).values(), f.values()), 1e-12);
        for (std::size_t i = 0; i < g.size(); ++i)
            EXPECT_NEAR(std::abs(moved[i] - bl(g.point(i) + a)), 0.0, 1e-12);
    }
}

TEST(Dalembert, StandingWave) {
    const auto f = GridFunction::sample(periodic64, [](double x) { return std::sin(x); });
    const GridFunction zero(periodic64);
    EXPECT_LE(norm_inf(dalembert(f, zero, 1.0, M_PI / 2).values()), 1e-12);
    const GridFunction u = dalembert(f, zero, 1.0, 0.4);
    for (std::size_t i = 0; i < periodic64.size(); ++i)
        EXPECT_NEAR(std::abs(u[i] - std::sin(periodic64.point(i)) * std::cos(0.4)), 0.0, 1e-12);
}

TEST(Dalembert, VelocityOnly) {
    const GridFunction zero(periodic64);
    const auto g = GridFunction::sample(periodic64, [](double x) { return std::cos(x); });
    const GridFunction u = dalembert(zero, g, 1.0, M_PI / 2);
    for (std::size_t i = 0; i < periodic64.size(); ++i)
        EXPECT_NEAR(std::abs(u[i] - std::cos(periodic64.point(i))), 0.0, 1e-12);
}

TEST(Dalembert, MatchesQuadratureOfVelocity) {
    std::mt19937_64 rng(12);
    const Grid g(40, 0.0, 2.0 * M_PI);
    const auto bl = fixtures::random_band_limited(rng, 6, g);
    const GridFunction zero(g);
    const double v = 1.3, dt = 0.8;
    const GridFunction u = dalembert(zero, sample(bl, g), v, dt);
    for (std::size_t i = 0; i < g.size(); i += 5) {
        const double x = g.point(i);
        const double ref = simpson([&](double s) { return bl(s); }, x - v * dt, x + v * dt) / (2 * v);
        EXPECT_NEAR(u[i].real(), ref, 1e-10);
        EXPECT_NEAR(u[i].imag(), 0.0, 1e-12);
    }
}

TEST(Dalembert, ZeroDataAndMeanTerm) {
    const GridFunction zero(periodic64);
    const GridFunction u = dalembert(zero, zero, 2.0, 1.5);
    for (const auto& z : u.values())
        EXPECT_EQ(z, complex(0.0));
    const GridFunction c(periodic64, StateVector(64, complex(0.5)));
    const GridFunction w = dalembert(zero, c, 2.0, 1.5);
    for (const auto& z : w.values())
        EXPECT_NEAR(std::abs(z - 0.75), 0.0, 1e-14);
}

TEST(Dalembert, InitialConditions) {
    std::mt19937_64 rng(14);
    const GridFunction f = sample(fixtures::random_band_limited(rng, 8, periodic64), periodic64);
    const GridFunction g = sample(fixtures::random_band_limited(rng, 8, periodic64), periodic64);
    EXPECT_EQ(dalembert(f, g, 1.5, 0.0).values(), f.values());
    std::vector<double> errs;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        const GridFunction up = dalembert(f, g, 1.5, eps);
        const GridFunction um = dalembert(f, g, 1.5, -eps);
        StateVector d(64);
        for (std::size_t i = 0; i < 64; ++i)
            d[i] = (up[i] - um[i]) / (2 * eps);
        errs.push_back(max_abs_diff(d, g.values()));
    }
    EXPECT_LE(errs.back(), 1e-3);
    EXPECT_NEAR(std::log2(errs[0] / errs[1]), 2.0, 0.2);
}

TEST(Dalembert, Errors) {
    const GridFunction a(periodic64);
    const GridFunction b(Grid(32, 0.0, 2.0 * M_PI));
    EXPECT_THROW(dalembert(a, b, 1.0, 1.0), DimensionError);
    EXPECT_THROW(dalembert(a, a, 0.0, 1.0), std::invalid_argument);
}

TEST(Dalembert, AgreesWithPropagator) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> vd(0.5, 2.0), td(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double v = vd(rng);
        const double dt = 2.0 / v * td(rng);
        const GridFunction f = sample(fixtures::random_band_limited(rng, 8, periodic64), periodic64);
        const GridFunction g = sample(fixtures::random_band_limited(rng, 8, periodic64), periodic64);
        const CauchyProblem p{2, FourierSymbol::derivative(periodic64, v * v, 2), 0.0,
                              {f.values(), g.values()}};
        EXPECT_LE(max_abs_diff(propagate(p, dt).state, dalembert(f, g, v, dt).values()), 1e-8);
    }
}

TEST(Translate, AdvectionPropagatorIsTranslation) {
    std::mt19937_64 rng(16);
    const double v = 0.9;
    const GridFunction f = sample(fixtures::random_band_limited(rng, 8, periodic64), periodic64);
    const CauchyProblem p{1, FourierSymbol::derivative(periodic64, v, 1), 0.0, {f.values()}};
    for (double dt : {0.3, 1.7, -2.2})
        EXPECT_LE(max_abs_diff(propagate(p, dt).state, translate(f, v * dt).values()), 1e-9);
}

TEST(HeatEigen, Values) {
    const GridFunction f0 = heat_eigen_exact(3, 1.0, 0.0, periodic64);
    for (std::size_t i = 0; i < 64; ++i)
        EXPECT_EQ(f0[i], complex(std::sin(3.0 * periodic64.point(i))));
    // sample 16 sits at x = pi/2
    EXPECT_NEAR(heat_eigen_exact(1, 1.0, 1.0, periodic64)[16].real(), 0.36787944117, 1e-11);
    // sample 8 sits at x = pi/4
    EXPECT_NEAR(heat_eigen_exact(2, 1.0, 0.25, periodic64)[8].real(), 0.36787944117, 1e-11);
    EXPECT_THROW(heat_eigen_exact(32, 1.0, 1.0, periodic64), std::invalid_argument);
}
