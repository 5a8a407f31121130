#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace cfode {

/// Uniform time grid on [t0, t1] with n nodes; node k is exactly t0 + k*h.
struct Grid {
    double t0;
    double t1;
    std::size_t n;
    double h;

    Grid(double t0, double t1, std::size_t n) : t0(t0), t1(t1), n(n) {
        if (!(t1 > t0))
            throw Error("Grid: t1 must exceed t0");
        if (n < 2)
            throw GridTooSmall("Grid: need at least 2 nodes");
        h = (t1 - t0) / static_cast<double>(n - 1);
    }

    double node(std::size_t k) const { return t0 + static_cast<double>(k) * h; }

    bool operator==(const Grid& other) const {
        return t0 == other.t0 && t1 == other.t1 && n == other.n;
    }
};

/// Real-valued function sampled on a uniform grid.
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    explicit GridFunction(const Grid& g) : grid(g), values(g.n, 0.0) {}

    GridFunction(const Grid& g, std::vector<double> v)
        : grid(g), values(std::move(v)) {
        if (values.size() != grid.n)
            throw Error("GridFunction: value count does not match grid");
        for (double x : values)
            if (!std::isfinite(x))
                throw Error("GridFunction: non-finite sample");
    }

    template <class F>
    static GridFunction sample(const Grid& g, F&& f) {
        std::vector<double> v(g.n);
        for (std::size_t k = 0; k < g.n; ++k) v[k] = f(g.node(k));
        return GridFunction(g, std::move(v));
    }

    double operator[](std::size_t k) const { return values[k]; }
    double& operator[](std::size_t k) { return values[k]; }
    std::size_t size() const { return grid.n; }
};

inline double max_norm(const GridFunction& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    GridFunction r(a.grid);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    GridFunction r(a.grid);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

inline GridFunction operator*(double c, const GridFunction& a) {
    GridFunction r(a.grid);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = c * a[k];
    return r;
}

}  // namespace cfode
