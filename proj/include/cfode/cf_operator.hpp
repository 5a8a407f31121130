#pragma once

#include <cmath>
#include <cstddef>

#include "grid.hpp"
#include "quadrature.hpp"

namespace cfode {

/// Fractional order bookkeeping: beta = 1 + alpha with 0 < alpha <= 1.
/// alpha = 1 is a valid order but the exponential-kernel weight
/// alpha/(1-alpha) diverges there, so kernel-based operators reject it.
struct CFOrder {
    double alpha;
    double beta;

    explicit CFOrder(double alpha) : alpha(alpha), beta(1.0 + alpha) {
        if (!(alpha > 0.0) || !(alpha <= 1.0))
            throw OrderOutOfRange("CFOrder: alpha must lie in (0, 1]");
    }

    // Kernel decay rate alpha/(1-alpha); only meaningful for alpha < 1.
    double theta() const {
        if (alpha >= 1.0)
            throw OrderOutOfRange("CFOrder: kernel weight singular at alpha = 1");
        return alpha / (1.0 - alpha);
    }
};

namespace detail {

/// Exponentially weighted running integral
///   G(t_i) = integral over [t0, t_i] of w(s) exp(-theta (t_i - s)) ds
/// by per-panel trapezoid, advanced with the one-step decay recursion.
/// Identical to composite trapezoid of the full integrand at each node,
/// but O(n) overall and free of large exp arguments.
inline GridFunction decaying_integral(const GridFunction& w, double theta) {
    GridFunction G(w.grid);
    const double h = w.grid.h;
    const double decay = std::exp(-theta * h);
    G[0] = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i)
        G[i] = decay * G[i - 1] + 0.5 * h * (w[i - 1] * decay + w[i]);
    return G;
}

/// Companion moment integral
///   H(t_i) = integral over [t0, t_i] of w(s) (t_i - s) exp(-theta (t_i - s)) ds.
/// The shift (t_i - s) = (t_{i-1} - s) + h couples H to G.
inline GridFunction decaying_moment_integral(const GridFunction& w, double theta) {
    const GridFunction G = decaying_integral(w, theta);
    GridFunction H(w.grid);
    const double h = w.grid.h;
    const double decay = std::exp(-theta * h);
    H[0] = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i)
        H[i] = decay * (H[i - 1] + h * G[i - 1]) + 0.5 * h * (w[i - 1] * h * decay);
    return H;
}

}  // namespace detail

/// First-order Caputo-Fabrizio derivative of order gamma in (0,1):
///   (1/(1-gamma)) * integral x'(s) exp(-gamma (t-s)/(1-gamma)) ds.
inline GridFunction cf_d_gamma(const GridFunction& x, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw OrderOutOfRange("cf_d_gamma: gamma must lie in (0, 1)");
    const double theta = gamma / (1.0 - gamma);
    const GridFunction dx = derivative(x);
    GridFunction out = detail::decaying_integral(dx, theta);
    const double scale = 1.0 / (1.0 - gamma);
    for (double& v : out.values) v *= scale;
    return out;
}

/// Caputo-Fabrizio derivative of order beta = 1 + alpha, built from u''
/// under the same exponential kernel. The lower limit a must be the grid
/// start.
inline GridFunction cf_d_beta(const GridFunction& u, const CFOrder& order, double a) {
    if (order.alpha >= 1.0)
        throw OrderOutOfRange("cf_d_beta: kernel operators require alpha < 1");
    if (std::abs(a - u.grid.t0) > 1e-12 * std::max(1.0, std::abs(u.grid.t0)))
        throw Error("cf_d_beta: lower limit must be the grid start");
    const double theta = order.theta();
    const GridFunction ddu = second_derivative(u);
    GridFunction out = detail::decaying_integral(ddu, theta);
    const double scale = 1.0 / (1.0 - order.alpha);
    for (double& v : out.values) v *= scale;
    return out;
}

/// Composed operator of order 2*gamma:
///   (1/(1-gamma)^2) * integral x'(s) [1 - theta (t-s)] exp(-theta (t-s)) ds
/// with theta = gamma/(1-gamma).
inline GridFunction cf_d_2gamma(const GridFunction& x, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw OrderOutOfRange("cf_d_2gamma: gamma must lie in (0, 1)");
    const double theta = gamma / (1.0 - gamma);
    const GridFunction dx = derivative(x);
    const GridFunction G = detail::decaying_integral(dx, theta);
    const GridFunction H = detail::decaying_moment_integral(dx, theta);
    GridFunction out(x.grid);
    const double scale = 1.0 / ((1.0 - gamma) * (1.0 - gamma));
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = scale * (G[k] - theta * H[k]);
    return out;
}

}  // namespace cfode
