#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "grid.hpp"

namespace cfode {

/// Physical parameters of the fractional mass-spring-damper equation
///   (m/sigma^{2(1-gamma)}) D^{2 gamma} x + (delta/sigma^{1-gamma}) D^gamma x
///     + k x = F(t).
struct MSDParams {
    double m;
    double delta;
    double k;
    double sigma;
    double gamma;

    MSDParams(double m, double delta, double k, double sigma, double gamma)
        : m(m), delta(delta), k(k), sigma(sigma), gamma(gamma) {
        if (!(m > 0.0)) throw Error("MSDParams: m must be positive");
        if (!(k > 0.0)) throw Error("MSDParams: k must be positive");
        if (!(sigma > 0.0)) throw Error("MSDParams: sigma must be positive");
        if (delta < 0.0) throw Error("MSDParams: delta must be >= 0");
        if (!(gamma > 0.0) || !(gamma < 1.0))
            throw OrderOutOfRange("MSDParams: gamma must lie in (0, 1)");
    }

    double sigma1() const { return std::pow(sigma, 1.0 - gamma); }
    double sigma2() const { return std::pow(sigma, 2.0 * (1.0 - gamma)); }
    double theta() const { return gamma / (1.0 - gamma); }
};

/// Second-kind Volterra problem y(t) + integral y(s) [A + B(t-s)] ds = F1(t).
struct VolterraProblem {
    double A;
    double B;
    GridFunction F1;
};

/// Reduce the mass-spring-damper equation to the Volterra problem for
/// y(t) = x(t) e^{gamma t/(1-gamma)}. With
///   P = m/(sigma2 (1-gamma)^2) + delta/(sigma1 (1-gamma)),
///   Q = m gamma/(sigma2 (1-gamma)^3),
/// one integration by parts of the combined kernel gives
///   A = -(Q + theta P)/(P + k),  B = theta Q/(P + k),
///   F1 = [F(t) e^{theta t} + x0 (P - Q t)]/(P + k).
/// (The boundary terms carry x(0) only; no slope input is needed.)
inline VolterraProblem msd_reduce(const MSDParams& params, const GridFunction& F,
                                  double x0) {
    if (std::abs(F.grid.t0) > 1e-12)
        throw Error("msd_reduce: grid must start at 0");
    const double omg = 1.0 - params.gamma;
    const double s1 = params.sigma1();
    const double s2 = params.sigma2();
    const double theta = params.theta();
    const double P = params.m / (s2 * omg * omg) + params.delta / (s1 * omg);
    const double Q = params.m * params.gamma / (s2 * omg * omg * omg);
    const double D = P + params.k;
    if (std::abs(D) <= 1e-12 * (std::abs(P) + params.k))
        throw SolvabilityViolation("msd_reduce: solvability denominator vanishes");

    const double A = -(Q + theta * P) / D;
    const double B = theta * Q / D;
    GridFunction F1(F.grid);
    for (std::size_t j = 0; j < F1.size(); ++j) {
        const double t = F.grid.node(j);
        F1[j] = (F[j] * std::exp(theta * t) + x0 * (P - Q * t)) / D;
    }
    return {A, B, std::move(F1)};
}

/// Direct trapezoidal time-march for the second-kind Volterra equation
/// with kernel A + B(t-s). O(n^2), second order.
inline GridFunction volterra_solve(const VolterraProblem& problem, const Grid& grid) {
    if (!(grid == problem.F1.grid))
        throw Error("volterra_solve: grid must match F1");
    const double h = grid.h;
    const double A = problem.A;
    const double B = problem.B;
    const double pivot = 1.0 + 0.5 * h * A;
    if (std::abs(pivot) < 1e-12)
        throw NearSingularStep("volterra_solve: 1 + (h/2) A nearly zero; reduce h");

    GridFunction y(grid);
    y[0] = problem.F1[0];
    for (std::size_t i = 1; i < grid.n; ++i) {
        double sum = 0.0;
        const double ti = grid.node(i);
        for (std::size_t j = 0; j < i; ++j) {
            const double weight = (j == 0) ? 0.5 * h : h;
            sum += weight * y[j] * (A + B * (ti - grid.node(j)));
        }
        y[i] = (problem.F1[i] - sum) / pivot;
    }
    return y;
}

/// Solve the mass-spring-damper equation. Rather than marching the grown
/// variable y = x e^{theta t} (whose trapezoid error constant scales like
/// theta^3 and ruins the gamma -> 1 limit), substitute back and march x
/// itself: x(t) + integral x(s) (A + B(t-s)) e^{-theta (t-s)} ds
///   = [F(t) + x0 (P - Q t) e^{-theta t}]/(P + k),
/// whose kernel and data stay bounded for every gamma in (0, 1).
inline GridFunction solve_msd(const MSDParams& params, const GridFunction& F,
                              double x0) {
    const Grid& grid = F.grid;
    if (std::abs(grid.t0) > 1e-12)
        throw Error("solve_msd: grid must start at 0");
    const double omg = 1.0 - params.gamma;
    const double theta = params.theta();
    const double P = params.m / (params.sigma2() * omg * omg) +
                     params.delta / (params.sigma1() * omg);
    const double Q = params.m * params.gamma / (params.sigma2() * omg * omg * omg);
    const double D = P + params.k;
    if (std::abs(D) <= 1e-12 * (std::abs(P) + params.k))
        throw SolvabilityViolation("solve_msd: solvability denominator vanishes");
    const double A = -(Q + theta * P) / D;
    const double B = theta * Q / D;

    const double h = grid.h;
    const std::size_t n = grid.n;

    GridFunction rhs(grid);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = grid.node(j);
        rhs[j] = (F[j] + x0 * (P - Q * t) * std::exp(-theta * t)) / D;
    }

    // Product-integration weights: with x piecewise linear on each panel,
    // the moments of (A + B u) e^{-theta u} over [(d-1)h, dh] are exact.
    // C1[d] weights the older panel endpoint, C0[d] the newer one.
    std::vector<double> C0(n), C1(n);
    if (theta * h < 1e-6) {
        // kernel nearly linear across a panel; polynomial weights suffice
        auto Kf = [&](double u) { return (A + B * u) * std::exp(-theta * u); };
        for (std::size_t d = 1; d < n; ++d) {
            const double Ka = Kf(static_cast<double>(d - 1) * h);
            const double Kb = Kf(static_cast<double>(d) * h);
            C1[d] = h * (Ka / 6.0 + Kb / 3.0);
            C0[d] = h * (Ka / 3.0 + Kb / 6.0);
        }
    } else {
        const double th2 = theta * theta, th3 = th2 * theta;
        auto anti0 = [&](double u) { return -std::exp(-theta * u) / theta; };
        auto anti1 = [&](double u) {
            return -std::exp(-theta * u) * (u / theta + 1.0 / th2);
        };
        auto anti2 = [&](double u) {
            return -std::exp(-theta * u) * (u * u / theta + 2.0 * u / th2 + 2.0 / th3);
        };
        for (std::size_t d = 1; d < n; ++d) {
            const double a = static_cast<double>(d - 1) * h;
            const double b = static_cast<double>(d) * h;
            const double e0 = anti0(b) - anti0(a);
            const double e1 = anti1(b) - anti1(a);
            const double e2 = anti2(b) - anti2(a);
            const double m0 = A * e0 + B * e1;
            const double m1 = A * e1 + B * e2;
            C1[d] = (m1 - a * m0) / h;
            C0[d] = (b * m0 - m1) / h;
        }
    }

    const double pivot = 1.0 + C0[1];
    if (std::abs(pivot) < 1e-12)
        throw NearSingularStep("solve_msd: marching pivot nearly zero; reduce h");

    // weight on x_{i-l}: C1[l] from its panel's older side plus C0[l+1]
    // from the neighbouring panel's newer side
    std::vector<double> W(n);
    for (std::size_t l = 1; l + 1 < n; ++l) W[l] = C1[l] + C0[l + 1];

    GridFunction x(grid);
    x[0] = rhs[0];
    for (std::size_t i = 1; i < n; ++i) {
        double sum = C1[i] * x[0];
        for (std::size_t l = 1; l < i; ++l) sum += W[l] * x[i - l];
        x[i] = (rhs[i] - sum) / pivot;
    }
    return x;
}

}  // namespace cfode
