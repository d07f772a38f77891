#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace gexp {

enum class BoundaryRule { ClampPayoff, LinearExtrapolate };

/// Uniform cell-centered grid on [-half_width, half_width]: node j sits at
/// lo + (j + ½)·dx, so the origin falls between the two middle cells and all
/// point reads interpolate.
struct CellGrid {
    double lo{0.0};
    double dx{0.0};
    int n{0};

    static CellGrid centered(double half_width, double dx) {
        if (!(half_width > 0.0) || !(dx > 0.0)) {
            throw std::invalid_argument("CellGrid: need half_width, dx > 0");
        }
        CellGrid g;
        g.n = std::max(4, static_cast<int>(std::lround(2.0 * half_width / dx)));
        g.dx = dx;
        g.lo = -0.5 * g.n * dx;
        return g;
    }

    double coord(int j) const { return lo + (j + 0.5) * dx; }
    double half_width() const { return -lo; }

    Eigen::ArrayXd coords() const {
        Eigen::ArrayXd x(n);
        for (int j = 0; j < n; ++j) x[j] = coord(j);
        return x;
    }

    /// Piecewise-linear read of nodal values at x. Out-of-range behaviour
    /// follows `rule`: clamp to the end value, or extend the end slope.
    double interp(const Eigen::ArrayXd& u, double x, BoundaryRule rule) const {
        const double s = (x - lo) / dx - 0.5;
        if (s <= 0.0) {
            if (rule == BoundaryRule::ClampPayoff) return u[0];
            return u[0] + (u[1] - u[0]) * s;
        }
        if (s >= n - 1.0) {
            if (rule == BoundaryRule::ClampPayoff) return u[n - 1];
            return u[n - 1] + (u[n - 1] - u[n - 2]) * (s - (n - 1));
        }
        const int j = static_cast<int>(s);
        const double w = s - j;
        return (1.0 - w) * u[j] + w * u[j + 1];
    }
};

}  // namespace gexp
