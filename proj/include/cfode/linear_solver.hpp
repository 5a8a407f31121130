#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "cf_operator.hpp"
#include "grid.hpp"
#include "quadrature.hpp"

namespace cfode {

enum class CaseTag { Degenerate, Positive, Negative };

inline const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::Degenerate: return "degenerate";
        case CaseTag::Positive: return "positive";
        case CaseTag::Negative: return "negative";
    }
    return "?";
}

/// Data of the order-beta linear equation D^beta u - lambda u = f on
/// [a, t1], with initial values u(a), u'(a).
struct LinearProblem {
    CFOrder order;
    double lambda;
    double a;
    GridFunction f;
    GridFunction f_prime;
    double u_a;
    double up_a;

    LinearProblem(CFOrder order, double lambda, double a, GridFunction f,
                  GridFunction f_prime, double u_a, double up_a)
        : order(order), lambda(lambda), a(a), f(std::move(f)),
          f_prime(std::move(f_prime)), u_a(u_a), up_a(up_a) {
        if (!(this->f.grid == this->f_prime.grid))
            throw Error("LinearProblem: f and f' must share one grid");
        if (std::abs(this->f.grid.t0 - a) > 1e-12 * std::max(1.0, std::abs(a)))
            throw Error("LinearProblem: grid must start at a");
        if (!std::isfinite(lambda))
            throw Error("LinearProblem: lambda must be finite");
    }
};

/// Constant-coefficient reduction v'' - mu1 v' + mu2 v = g of the
/// fractional equation, with its discriminant classification.
struct ReducedODE {
    double mu1;
    double mu2;
    GridFunction g;
    double discriminant;
    CaseTag case_tag;
};

struct Solution {
    GridFunction u;
    std::pair<double, double> constants;
    CaseTag case_tag;
    double residual_norm;  // max-norm of D^beta u - lambda u - f, recomputed
};

/// Discriminant A(lambda) = 4 lambda alpha + lambda^2 (1-alpha)^2 and its
/// sign class. Degenerate within relative tolerance 1e-12 * max(1, lambda^2).
inline std::pair<double, CaseTag> discriminant_case(const CFOrder& order, double lambda) {
    if (order.alpha >= 1.0)
        throw OrderOutOfRange("discriminant_case: requires alpha < 1");
    const double oma = 1.0 - order.alpha;
    const double disc = 4.0 * lambda * order.alpha + lambda * lambda * oma * oma;
    const double tol = 1e-12 * std::max(1.0, lambda * lambda);
    CaseTag tag;
    if (std::abs(disc) <= tol)
        tag = CaseTag::Degenerate;
    else
        tag = disc > 0.0 ? CaseTag::Positive : CaseTag::Negative;
    return {disc, tag};
}

namespace detail {

/// Solve v'' - mu1 v' + mu2 v = w(t) e^{theta (t - t0)} for
/// u(t) = v(t) e^{-theta (t - t0)} directly in u, with u(t0) = u0 and
/// u'(t0) = du0. All exponentials are combined before sampling so that
/// only the damped factor w = g e^{-theta t} enters the quadrature.
///
/// The particular part built from cumulative integrals vanishes to first
/// order at t0, so the constant fit reduces to the homogeneous basis.
inline std::pair<GridFunction, std::pair<double, double>>
solve_reduced(double theta, double mu1, double disc, CaseTag tag,
              const GridFunction& w, double u0, double du0) {
    const Grid& grid = w.grid;
    const std::size_t n = grid.n;

    const bool degenerate =
        tag == CaseTag::Degenerate || std::sqrt(std::abs(disc)) < 1e-6;

    auto tau = [&](std::size_t k) { return grid.node(k) - grid.t0; };

    if (degenerate) {
        // Double root r = mu1/2; decay rate of u is rho = r - theta.
        const double rho = 0.5 * mu1 - theta;
        GridFunction w_damped(grid), w_damped_t(grid);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = tau(k);
            const double e = std::exp(-rho * s);
            w_damped[k] = w[k] * e;
            w_damped_t[k] = w[k] * e * s;
        }
        const GridFunction I1 = cumulative_integral(w_damped_t);
        const GridFunction I2 = cumulative_integral(w_damped);
        const double c1 = u0;
        const double c2 = du0 - rho * u0;
        GridFunction u(grid);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = tau(k);
            u[k] = std::exp(rho * s) * (c1 + c2 * s - I1[k] + s * I2[k]);
        }
        return {std::move(u), {c1, c2}};
    }

    if (disc > 0.0) {
        const double root = std::sqrt(disc);
        // u-level decay rates: rho_pm = (mu1 +- root)/2 - theta.
        const double rho_p = 0.5 * (mu1 + root) - theta;
        const double rho_m = 0.5 * (mu1 - root) - theta;
        GridFunction wp(grid), wm(grid);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = tau(k);
            wp[k] = w[k] * std::exp(-rho_p * s);
            wm[k] = w[k] * std::exp(-rho_m * s);
        }
        const GridFunction Ip = cumulative_integral(wp);
        const GridFunction Im = cumulative_integral(wm);
        // c3 + c4 = u0, rho_p c3 + rho_m c4 = du0.
        const double det = rho_m - rho_p;
        if (std::abs(det) < 1e-300)
            throw SingularConstantFit("solve_reduced: repeated fundamental pair");
        const double c3 = (rho_m * u0 - du0) / det;
        const double c4 = (du0 - rho_p * u0) / det;
        GridFunction u(grid);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = tau(k);
            u[k] = std::exp(rho_p * s) * (c3 + Ip[k] / root) +
                   std::exp(rho_m * s) * (c4 - Im[k] / root);
        }
        return {std::move(u), {c3, c4}};
    }

    // Complex pair: u = e^{c tau} [cos(omega tau)(...) + sin(omega tau)(...)],
    // c = mu1/2 - theta, omega = sqrt(-disc)/2.
    const double c = 0.5 * mu1 - theta;
    const double omega = 0.5 * std::sqrt(-disc);
    GridFunction ws(grid), wc(grid);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = tau(k);
        const double e = w[k] * std::exp(-c * s);
        ws[k] = e * std::sin(omega * s);
        wc[k] = e * std::cos(omega * s);
    }
    const GridFunction Is = cumulative_integral(ws);
    const GridFunction Ic = cumulative_integral(wc);
    const double c5 = u0;
    const double c6 = (du0 - c * u0) / omega;
    GridFunction u(grid);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = tau(k);
        u[k] = std::exp(c * s) *
               (std::cos(omega * s) * (c5 - Is[k] / omega) +
                std::sin(omega * s) * (c6 + Ic[k] / omega));
    }
    return {std::move(u), {c5, c6}};
}

}  // namespace detail

/// Reduction of the linear problem to v'' - mu1 v' + mu2 v = g with
/// v = u e^{alpha t/(1-alpha)}:
///   mu1 = 2 alpha/(1-alpha) + lambda (1-alpha),
///   mu2 = (alpha/(1-alpha))^2,
///   g   = [(1-alpha) f' + alpha f] e^{alpha t/(1-alpha)}.
inline ReducedODE reduce(const LinearProblem& p) {
    const double alpha = p.order.alpha;
    const double theta = p.order.theta();
    const double mu1 = 2.0 * theta + p.lambda * (1.0 - alpha);
    const double mu2 = theta * theta;
    auto [disc, tag] = discriminant_case(p.order, p.lambda);
    GridFunction g(p.f.grid);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double s = p.f.grid.node(k) - p.f.grid.t0;
        g[k] = ((1.0 - alpha) * p.f_prime[k] + alpha * p.f[k]) * std::exp(theta * s);
    }
    return {mu1, mu2, std::move(g), disc, tag};
}

/// Closed-form solution of D^beta u - lambda u = f with the two free
/// constants fitted to u(a) and u'(a). Requires f(a) = 0.
inline Solution solve(const LinearProblem& p) {
    const double fnorm = max_norm(p.f);
    if (std::abs(p.f[0]) > 1e-12 * fnorm) {
        throw NonzeroForcingAtStart(
            "solve: f(a) must vanish; solution would carry the residual term "
            "f(a) e^{-alpha (t-a)/(1-alpha)}",
            std::abs(p.f[0]));
    }

    const double alpha = p.order.alpha;
    const double theta = p.order.theta();
    const double mu1 = 2.0 * theta + p.lambda * (1.0 - alpha);
    auto [disc, tag] = discriminant_case(p.order, p.lambda);

    // Damped forcing w = g e^{-theta t} = (1-alpha) f' + alpha f.
    GridFunction w(p.f.grid);
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = (1.0 - alpha) * p.f_prime[k] + alpha * p.f[k];

    auto [u, constants] =
        detail::solve_reduced(theta, mu1, disc, tag, w, p.u_a, p.up_a);

    const GridFunction dbeta = cf_d_beta(u, p.order, p.a);
    double res = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        res = std::max(res, std::abs(dbeta[k] - p.lambda * u[k] - p.f[k]));

    return {std::move(u), constants, tag, res};
}

/// Reduction of the general three-term equation
///   a D^{1+alpha} u + b D^{alpha} u + c u = h
/// to v'' - mu1 v' + mu2 v = g with v = u e^{alpha t/(1-alpha)}.
/// Coefficients are derived from two integrations by parts of the kernel
/// definition:
///   mu1 = -(b - 2 a theta + c (1-alpha)) / a,
///   mu2 = -theta (b - a theta) / a,
///   g   = [(1-alpha) h' + alpha h] e^{theta t} / a.
inline ReducedODE reduce_general(double a_coef, double b_coef, double c_coef,
                                 const CFOrder& order, const GridFunction& h,
                                 const GridFunction& h_prime) {
    if (a_coef == 0.0)
        throw DegenerateLeadingCoefficient(
            "reduce_general: leading coefficient must be nonzero");
    if (order.alpha >= 1.0)
        throw OrderOutOfRange("reduce_general: requires alpha < 1");
    if (!(h.grid == h_prime.grid))
        throw Error("reduce_general: h and h' must share one grid");

    const double alpha = order.alpha;
    const double theta = order.theta();
    const double mu1 = -(b_coef - 2.0 * a_coef * theta + c_coef * (1.0 - alpha)) / a_coef;
    const double mu2 = -theta * (b_coef - a_coef * theta) / a_coef;
    const double disc = mu1 * mu1 - 4.0 * mu2;
    const double tol = 1e-12 * std::max(1.0, mu1 * mu1);
    CaseTag tag;
    if (std::abs(disc) <= tol)
        tag = CaseTag::Degenerate;
    else
        tag = disc > 0.0 ? CaseTag::Positive : CaseTag::Negative;

    GridFunction g(h.grid);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double s = h.grid.node(k) - h.grid.t0;
        g[k] = ((1.0 - alpha) * h_prime[k] + alpha * h[k]) * std::exp(theta * s) / a_coef;
    }
    return {mu1, mu2, std::move(g), disc, tag};
}

/// Solve the general three-term equation through its reduction, with
/// u(t0) = u0 and u'(t0) = du0.
inline GridFunction solve_general(double a_coef, double b_coef, double c_coef,
                                  const CFOrder& order, const GridFunction& h,
                                  const GridFunction& h_prime, double u0,
                                  double du0) {
    const ReducedODE red =
        reduce_general(a_coef, b_coef, c_coef, order, h, h_prime);
    const double alpha = order.alpha;
    const double theta = order.theta();
    GridFunction w(h.grid);
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = ((1.0 - alpha) * h_prime[k] + alpha * h[k]) / a_coef;
    auto [u, constants] = detail::solve_reduced(theta, red.mu1, red.discriminant,
                                                red.case_tag, w, u0, du0);
    (void)constants;
    return u;
}

}  // namespace cfode
