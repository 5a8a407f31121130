#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cf_operator.hpp"
#include "grid.hpp"
#include "quadrature.hpp"

namespace cfode {

/// Initial value problem D^beta u = phi(t, u), u(0) = U0, u'(0) = U1 on
/// [0, T], with Lipschitz constants L1 (phi) and L2 (d phi/dt).
struct NonlinearProblem {
    CFOrder order;
    double T;
    std::function<double(double, double)> phi;
    // Optional total derivative d/dt phi(t, u(t)) as (t, u, u') -> real.
    // When empty, it is approximated by differentiating the composed
    // sample t -> phi(t, u(t)) on the grid.
    std::function<double(double, double, double)> phi_t;
    double L1;
    double L2;
    double U0;
    double U1;

    NonlinearProblem(CFOrder order, double T,
                     std::function<double(double, double)> phi, double L1,
                     double L2, double U0, double U1,
                     std::function<double(double, double, double)> phi_t = {})
        : order(order), T(T), phi(std::move(phi)), phi_t(std::move(phi_t)),
          L1(L1), L2(L2), U0(U0), U1(U1) {
        if (!(T > 0.0))
            throw Error("NonlinearProblem: T must be positive");
        if (L1 < 0.0 || L2 < 0.0)
            throw Error("NonlinearProblem: Lipschitz constants must be >= 0");
    }
};

struct PicardState {
    GridFunction iterate;
    int iteration_count;
    std::vector<double> successive_diffs;  // sup-norms of consecutive diffs
};

/// Contraction factor q = 2T((1-alpha) L2 + alpha L1); the fixed-point
/// map is a contraction iff q < 1.
inline double contraction_check(const NonlinearProblem& p) {
    return 2.0 * p.T * ((1.0 - p.order.alpha) * p.L2 + p.order.alpha * p.L1);
}

/// One application of the fixed-point operator. Inverting the exponential
/// kernel shows a solution must satisfy u'' = (1-alpha) dphi/dt + alpha phi,
/// so N u(t) = U0 + U1 t + int_0^t (t-s) [(1-alpha) phi'(s) + alpha phi(s)] ds,
/// expanded as t*I[w] - I[s w] with two running integrals.
inline GridFunction apply_N(const NonlinearProblem& p, const GridFunction& u) {
    const Grid& grid = u.grid;
    const double alpha = p.order.alpha;

    GridFunction composed(grid);
    for (std::size_t k = 0; k < grid.n; ++k)
        composed[k] = p.phi(grid.node(k), u[k]);

    GridFunction dphi(grid);
    if (p.phi_t) {
        const GridFunction du = derivative(u);
        for (std::size_t k = 0; k < grid.n; ++k)
            dphi[k] = p.phi_t(grid.node(k), u[k], du[k]);
    } else {
        dphi = derivative(composed);
    }

    GridFunction w(grid), sw(grid);
    for (std::size_t k = 0; k < grid.n; ++k) {
        w[k] = (1.0 - alpha) * dphi[k] + alpha * composed[k];
        sw[k] = grid.node(k) * w[k];
    }
    const GridFunction Iw = cumulative_integral(w);
    const GridFunction Isw = cumulative_integral(sw);

    GridFunction out(grid);
    for (std::size_t k = 0; k < grid.n; ++k) {
        const double t = grid.node(k);
        out[k] = p.U0 + p.U1 * t + t * Iw[k] - Isw[k];
    }
    return out;
}

/// Picard iteration from u_0 = U0 + U1 t until the sup-norm of consecutive
/// iterates drops below tol. Refuses non-contractive problems.
inline std::pair<GridFunction, PicardState>
picard_solve(const NonlinearProblem& p, const Grid& grid, double tol,
             int max_iter) {
    const double q = contraction_check(p);
    if (!(q < 1.0))
        throw NotContractive("picard_solve: not contractive: q=" + std::to_string(q), q);
    if (!(tol > 0.0))
        throw Error("picard_solve: tol must be positive");
    if (std::abs(grid.t0) > 1e-12 || std::abs(grid.t1 - p.T) > 1e-12 * std::max(1.0, p.T))
        throw Error("picard_solve: grid must cover [0, T]");

    GridFunction u = GridFunction::sample(
        grid, [&](double t) { return p.U0 + p.U1 * t; });

    PicardState state{u, 0, {}};
    for (int it = 1; it <= max_iter; ++it) {
        GridFunction next = apply_N(p, u);
        const double diff = max_norm(next - u);
        state.successive_diffs.push_back(diff);
        state.iteration_count = it;
        u = std::move(next);
        if (diff <= tol) {
            state.iterate = u;
            return {std::move(u), std::move(state)};
        }
    }
    throw MaxIterationsExceeded(
        "picard_solve: no convergence after " + std::to_string(max_iter) +
            " iterations; last diff " + std::to_string(state.successive_diffs.back()),
        state.successive_diffs.back());
}

}  // namespace cfode
