#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cfode/grid.hpp"
#include "cfode/quadrature.hpp"

using namespace cfode;

TEST_CASE("cumulative_integral of zero is zero") {
    Grid g(0.0, 1.0, 11);
    GridFunction f(g);
    const GridFunction F = cumulative_integral(f);
    for (std::size_t k = 0; k < F.size(); ++k) CHECK(F[k] == 0.0);
}

TEST_CASE("cumulative_integral is exact for constants") {
    Grid g(0.0, 1.0, 11);
    const GridFunction f = GridFunction::sample(g, [](double) { return 1.0; });
    const GridFunction F = cumulative_integral(f);
    for (std::size_t k = 0; k < F.size(); ++k)
        CHECK(F[k] == Catch::Approx(g.node(k)).margin(1e-15));
    CHECK(F[0] == 0.0);
}

TEST_CASE("cumulative_integral is exact for linear integrands") {
    Grid g(0.0, 1.0, 11);
    const GridFunction f = GridFunction::sample(g, [](double t) { return t; });
    const GridFunction F = cumulative_integral(f);
    // analytic oracle: integral of t from 0 to 1 is 0.5
    CHECK(F[10] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("cumulative_integral linearity") {
    Grid g(0.0, 2.0, 101);
    const GridFunction f = GridFunction::sample(g, [](double t) { return std::sin(t); });
    const GridFunction p = GridFunction::sample(g, [](double t) { return std::exp(-t); });
    const double a = 2.5, b = -1.25;
    GridFunction combo(g);
    for (std::size_t k = 0; k < g.n; ++k) combo[k] = a * f[k] + b * p[k];
    const GridFunction lhs = cumulative_integral(combo);
    const GridFunction Ff = cumulative_integral(f);
    const GridFunction Fp = cumulative_integral(p);
    for (std::size_t k = 0; k < g.n; ++k)
        CHECK(lhs[k] == Catch::Approx(a * Ff[k] + b * Fp[k]).margin(1e-13));
}

TEST_CASE("cumulative_integral converges at second order") {
    auto err_at_end = [](std::size_t n) {
        Grid g(0.0, 1.0, n);
        const GridFunction f =
            GridFunction::sample(g, [](double t) { return std::exp(t) * std::cos(3.0 * t); });
        const GridFunction F = cumulative_integral(f);
        // analytic: integral of e^t cos(3t) = e^t (cos 3t + 3 sin 3t)/10
        const double exact =
            (std::exp(1.0) * (std::cos(3.0) + 3.0 * std::sin(3.0)) - 1.0) / 10.0;
        return std::abs(F[n - 1] - exact);
    };
    const double e1 = err_at_end(101);
    const double e2 = err_at_end(201);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("derivative of a constant vanishes") {
    Grid g(0.0, 1.0, 11);
    const GridFunction f = GridFunction::sample(g, [](double) { return 4.25; });
    const GridFunction d = derivative(f);
    for (std::size_t k = 0; k < d.size(); ++k)
        CHECK(d[k] == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("derivative exact for quadratics at interior nodes") {
    Grid g(0.0, 1.0, 11);
    const GridFunction f = GridFunction::sample(g, [](double t) { return t * t; });
    const GridFunction d = derivative(f);
    for (std::size_t k = 1; k + 1 < d.size(); ++k)
        CHECK(d[k] == Catch::Approx(2.0 * g.node(k)).margin(1e-13));
}

TEST_CASE("derivative of sin matches cos") {
    Grid g(0.0, std::acos(-1.0), 2001);
    const GridFunction f = GridFunction::sample(g, [](double t) { return std::sin(t); });
    const GridFunction d = derivative(f);
    double err = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
        err = std::max(err, std::abs(d[k] - std::cos(g.node(k))));
    CHECK(err < 1e-5);
}

TEST_CASE("derivative rejects tiny grids") {
    Grid g(0.0, 1.0, 2);
    GridFunction f(g);
    CHECK_THROWS_AS(derivative(f), GridTooSmall);
}

TEST_CASE("second_derivative of linear functions vanishes") {
    Grid g(0.0, 1.0, 21);
    const GridFunction f = GridFunction::sample(g, [](double t) { return 3.0 * t - 1.0; });
    const GridFunction d = second_derivative(f);
    for (std::size_t k = 0; k < d.size(); ++k)
        CHECK(d[k] == Catch::Approx(0.0).margin(1e-11));
}

TEST_CASE("second_derivative exact on quadratics at interior nodes") {
    Grid g(0.0, 1.0, 21);
    const GridFunction f = GridFunction::sample(g, [](double t) { return t * t; });
    const GridFunction d = second_derivative(f);
    for (std::size_t k = 1; k + 1 < d.size(); ++k)
        CHECK(d[k] == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("second_derivative of exp") {
    Grid g(0.0, 1.0, 4001);
    const GridFunction f = GridFunction::sample(g, [](double t) { return std::exp(t); });
    const GridFunction d = second_derivative(f);
    double rel = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
        rel = std::max(rel, std::abs(d[k] - std::exp(g.node(k))) / std::exp(g.node(k)));
    CHECK(rel < 1e-5);
}

TEST_CASE("second_derivative rejects grids below 4 nodes") {
    Grid g(0.0, 1.0, 3);
    GridFunction f(g);
    CHECK_THROWS_AS(second_derivative(f), GridTooSmall);
}

TEST_CASE("derivative of cumulative_integral recovers the integrand") {
    Grid g(0.0, 2.0, 2001);
    const GridFunction f =
        GridFunction::sample(g, [](double t) { return std::sin(2.0 * t) + t; });
    const GridFunction rec = derivative(cumulative_integral(f));
    double err = 0.0;
    for (std::size_t k = 1; k + 1 < g.n; ++k)
        err = std::max(err, std::abs(rec[k] - f[k]));
    CHECK(err < 5e-6);  // O(h^2)
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(1.0, 0.0, 10), Error);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1), GridTooSmall);
    Grid g(0.0, 1.0, 5);
    CHECK(g.h == Catch::Approx(0.25));
    CHECK(g.node(4) == Catch::Approx(1.0));
}
