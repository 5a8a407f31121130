#pragma once

#include <cstddef>

#include "grid.hpp"

namespace cfode {

/// Running composite-trapezoid antiderivative: F(t0) = 0,
/// F(tk) = integral of f from t0 to tk. Second order in h.
inline GridFunction cumulative_integral(const GridFunction& f) {
    GridFunction F(f.grid);
    const double half_h = 0.5 * f.grid.h;
    double acc = 0.0;
    F[0] = 0.0;
    for (std::size_t k = 1; k < f.size(); ++k) {
        acc += half_h * (f[k - 1] + f[k]);
        F[k] = acc;
    }
    return F;
}

/// First derivative: central differences inside, second-order one-sided
/// stencils at the endpoints.
inline GridFunction derivative(const GridFunction& f) {
    const std::size_t n = f.size();
    if (n < 3)
        throw GridTooSmall("derivative: need at least 3 nodes");
    const double h = f.grid.h;
    GridFunction d(f.grid);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t k = 1; k + 1 < n; ++k)
        d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

/// Second derivative: three-point second difference inside, second-order
/// one-sided four-point stencils at the endpoints.
inline GridFunction second_derivative(const GridFunction& f) {
    const std::size_t n = f.size();
    if (n < 4)
        throw GridTooSmall("second_derivative: need at least 4 nodes");
    const double h2 = f.grid.h * f.grid.h;
    GridFunction d(f.grid);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (std::size_t k = 1; k + 1 < n; ++k)
        d[k] = (f[k - 1] - 2.0 * f[k] + f[k + 1]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

}  // namespace cfode
