#include "gexp/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace gexp {

double lipschitz_violation(const Payoff& phi, double lo, double hi, int samples) {
    if (!phi.lipschitz_bound) return 0.0;
    const double bound = *phi.lipschitz_bound;
    const double h = (hi - lo) / samples;
    double worst = -std::numeric_limits<double>::infinity();
    if (phi.dim() == 1) {
        double prev = phi(lo);
        for (int i = 1; i <= samples; ++i) {
            const double cur = phi(lo + i * h);
            worst = std::max(worst, std::abs(cur - prev) / h - bound * (1.0 + 1e-9));
            prev = cur;
        }
    } else {
        for (int i = 0; i <= samples; ++i) {
            for (int j = 0; j < samples; ++j) {
                const double x = lo + i * h, y = lo + j * h;
                const double d = std::abs(phi(x, y + h) - phi(x, y)) / h;
                worst = std::max(worst, d - bound * (1.0 + 1e-9));
            }
        }
    }
    return worst;
}

namespace {

double max_over_segment(const Payoff& phi, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b, double resolution) {
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const Eigen::VectorXd p = a + (b - a) * (static_cast<double>(i) / n);
        best = std::max(best, p.size() == 1 ? phi(p[0]) : phi(p[0], p[1]));
    }
    return best;
}

}  // namespace

double maximal_expectation(const Payoff& phi, const MaximalSupport& gamma,
                           double resolution) {
    gamma.validate();
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("maximal_expectation: resolution must be > 0");
    }

    if (!gamma.points.empty()) {
        // Convex hull of a finite point list: scan segments point_i -> point_j
        // for d=1 this covers the hull; for d=2 scan the triangle fan of all
        // pairs against the first point on a barycentric grid.
        const auto& pts = gamma.points;
        if (gamma.dim() == 1) {
            double lo = pts.front()[0], hi = lo;
            for (const auto& p : pts) {
                lo = std::min(lo, p[0]);
                hi = std::max(hi, p[0]);
            }
            return max_over_segment(phi, Eigen::VectorXd::Constant(1, lo),
                                    Eigen::VectorXd::Constant(1, hi), resolution);
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i; j < pts.size(); ++j) {
                const double len = (pts[j] - pts[i]).norm();
                const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
                for (int s = 0; s <= n; ++s) {
                    const Eigen::VectorXd edge =
                        pts[i] + (pts[j] - pts[i]) * (static_cast<double>(s) / n);
                    best = std::max(best,
                                    max_over_segment(phi, pts[0], edge, resolution));
                }
            }
        }
        return best;
    }

    if (gamma.dim() == 1) {
        return max_over_segment(phi, gamma.lo, gamma.hi, resolution);
    }
    const int nx = std::max(1, static_cast<int>(std::ceil((gamma.hi[0] - gamma.lo[0]) / resolution)));
    const int ny = std::max(1, static_cast<int>(std::ceil((gamma.hi[1] - gamma.lo[1]) / resolution)));
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= nx; ++i) {
        const double x = gamma.lo[0] + (gamma.hi[0] - gamma.lo[0]) * i / nx;
        for (int j = 0; j <= ny; ++j) {
            const double y = gamma.lo[1] + (gamma.hi[1] - gamma.lo[1]) * j / ny;
            best = std::max(best, phi(x, y));
        }
    }
    return best;
}

}  // namespace gexp
