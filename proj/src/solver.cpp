#include "gexp/solver.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace gexp {

namespace {

constexpr double kCflLimit = 0.5 + 1e-12;

long step_count(double horizon, double dt, double& last_dt) {
    const long n_full = static_cast<long>(std::floor(horizon / dt + 1e-12));
    const double rem = horizon - n_full * dt;
    last_dt = rem;
    return n_full;
}

void check_finite(const Eigen::ArrayXXd& u, long step) {
    if (!u.allFinite()) {
        throw std::runtime_error("gheat solver: non-finite value at step " +
                                 std::to_string(step));
    }
}

// One explicit step, all columns at once. Rows index space, columns index
// independent problems. Edge rows stay frozen (clamp) or get re-extrapolated.
void step_columns(Eigen::ArrayXXd& u, Eigen::ArrayXXd& d2,
                  const VolatilityInterval& iv, double dt, double inv_dx2,
                  BoundaryRule rule) {
    const Eigen::Index n = u.rows();
    d2 = (u.topRows(n - 2) + u.bottomRows(n - 2) - 2.0 * u.middleRows(1, n - 2)) *
         inv_dx2;
    u.middleRows(1, n - 2) +=
        dt * (0.5 * iv.sigma_hi_sq * d2.max(0.0) + 0.5 * iv.sigma_lo_sq * d2.min(0.0));
    if (rule == BoundaryRule::LinearExtrapolate) {
        u.row(0) = 2.0 * u.row(1) - u.row(2);
        u.row(n - 1) = 2.0 * u.row(n - 2) - u.row(n - 3);
    }
}

}  // namespace

void SolverConfig::validate_1d(const VolatilityInterval& iv) const {
    iv.validate();
    if (!(space_step > 0.0) || !(time_step > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("SolverConfig: need dx, dt, t > 0");
    }
    if (cfl_ratio_1d(iv) > kCflLimit) {
        throw std::invalid_argument(
            "SolverConfig: CFL violated, dt*sigma_hi_sq/dx^2 = " +
            std::to_string(cfl_ratio_1d(iv)) + " > 1/2");
    }
    const double needed = 4.0 * std::sqrt(iv.sigma_hi_sq * horizon);
    if (domain_half_width + 1e-12 < needed) {
        throw std::invalid_argument(
            "SolverConfig: domain too small, need L >= 4*sigma_hi*sqrt(t) = " +
            std::to_string(needed));
    }
}

void SolverConfig::validate_2d(const CovarianceSet& sigma) const {
    sigma.validate();
    if (!(space_step > 0.0) || !(time_step > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("SolverConfig: need dx, dt, t > 0");
    }
    if (!sigma.diagonally_dominant()) {
        throw std::invalid_argument(
            "SolverConfig: 2D scheme needs every vertex diagonally dominant "
            "(sigma1_sq, sigma3_sq >= |sigma2_sq|)");
    }
    if (cfl_ratio_2d(sigma) > kCflLimit) {
        throw std::invalid_argument("SolverConfig: 2D CFL violated, ratio = " +
                                    std::to_string(cfl_ratio_2d(sigma)) + " > 1/2");
    }
    const double needed = 4.0 * std::sqrt(sigma.max_var() * horizon);
    if (domain_half_width + 1e-12 < needed) {
        throw std::invalid_argument(
            "SolverConfig: domain too small, need L >= 4*sigma_hi*sqrt(t)");
    }
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
    SolverConfig c;
    c.domain_half_width = j.at("L").get<double>();
    c.space_step = j.at("dx").get<double>();
    c.time_step = j.at("dt").get<double>();
    c.horizon = j.at("t").get<double>();
    if (j.contains("boundary")) {
        const std::string b = j.at("boundary").get<std::string>();
        if (b == "clamp") {
            c.boundary = BoundaryRule::ClampPayoff;
        } else if (b == "extrapolate") {
            c.boundary = BoundaryRule::LinearExtrapolate;
        } else {
            throw std::invalid_argument("solver config: boundary must be 'clamp' or 'extrapolate'");
        }
    }
    return c;
}

nlohmann::json to_json(const SolverConfig& c) {
    return {{"L", c.domain_half_width},
            {"dx", c.space_step},
            {"dt", c.time_step},
            {"t", c.horizon},
            {"boundary", c.boundary == BoundaryRule::ClampPayoff ? "clamp" : "extrapolate"}};
}

SolutionField1 solve_gheat_1d(const Payoff& phi, const VolatilityInterval& iv,
                              const SolverConfig& config) {
    const CellGrid grid = CellGrid::centered(config.domain_half_width, config.space_step);
    Eigen::ArrayXd u0(grid.n);
    for (int j = 0; j < grid.n; ++j) u0[j] = phi(grid.coord(j));
    return solve_gheat_1d_values(std::move(u0), grid, iv, config);
}

SolutionField1 solve_gheat_1d_values(Eigen::ArrayXd initial, const CellGrid& grid,
                                     const VolatilityInterval& iv,
                                     const SolverConfig& config) {
    config.validate_1d(iv);
    if (initial.size() != grid.n) {
        throw std::invalid_argument("solve_gheat_1d_values: size mismatch");
    }
    Eigen::ArrayXXd u(grid.n, 1);
    u.col(0) = initial;
    Eigen::ArrayXXd d2;
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);

    double last_dt = 0.0;
    const long n_full = step_count(config.horizon, config.time_step, last_dt);
    long steps = 0;
    for (long k = 0; k < n_full; ++k) {
        step_columns(u, d2, iv, config.time_step, inv_dx2, config.boundary);
        if ((++steps & 127) == 0) check_finite(u, steps);
    }
    if (last_dt > 1e-14 * config.horizon) {
        step_columns(u, d2, iv, last_dt, inv_dx2, config.boundary);
        ++steps;
    }
    check_finite(u, steps);

    SolutionField1 field;
    field.grid = grid;
    field.u = u.col(0);
    field.cfl_ratio = config.cfl_ratio_1d(iv);
    field.n_steps = steps;
    field.boundary = config.boundary;
    return field;
}

void solve_rows_evolve(Eigen::ArrayXXd& rows, const CellGrid& grid,
                       const VolatilityInterval& iv, double horizon, double dt,
                       BoundaryRule rule) {
    iv.validate();
    if (rows.cols() != grid.n) {
        throw std::invalid_argument("solve_rows_evolve: column count must match grid");
    }
    if (dt * iv.sigma_hi_sq / (grid.dx * grid.dx) > kCflLimit) {
        throw std::invalid_argument("solve_rows_evolve: CFL violated");
    }
    const Eigen::Index n_rows = rows.rows();
    const Eigen::Index n = grid.n;

    // Affine rows are exactly stationary under the scheme: skip them.
    std::vector<Eigen::Index> active;
    active.reserve(n_rows);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        double curv = 0.0, scale = 1.0;
        for (Eigen::Index j = 1; j + 1 < n; ++j) {
            curv = std::max(curv, std::abs(rows(r, j - 1) - 2.0 * rows(r, j) + rows(r, j + 1)));
            scale = std::max(scale, std::abs(rows(r, j)));
        }
        if (curv > 1e-13 * scale) active.push_back(r);
    }
    if (active.empty()) return;

    // Pack active rows as columns (space contiguous) and step them together.
    Eigen::ArrayXXd u(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c) {
        u.col(static_cast<Eigen::Index>(c)) = rows.row(active[c]).transpose();
    }

    Eigen::ArrayXXd d2;
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    double last_dt = 0.0;
    const long n_full = step_count(horizon, dt, last_dt);
    for (long k = 0; k < n_full; ++k) {
        step_columns(u, d2, iv, dt, inv_dx2, rule);
        if ((k & 255) == 255) check_finite(u, k + 1);
    }
    if (last_dt > 1e-14 * horizon) step_columns(u, d2, iv, last_dt, inv_dx2, rule);
    check_finite(u, n_full);

    for (std::size_t c = 0; c < active.size(); ++c) {
        rows.row(active[c]) = u.col(static_cast<Eigen::Index>(c)).transpose();
    }
}

Eigen::ArrayXd solve_rows_read(Eigen::ArrayXXd rows, const CellGrid& grid,
                               const VolatilityInterval& iv, double horizon,
                               double dt, double read_at, BoundaryRule rule) {
    solve_rows_evolve(rows, grid, iv, horizon, dt, rule);
    Eigen::ArrayXd out(rows.rows());
    Eigen::ArrayXd row(grid.n);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        row = rows.row(r).transpose();
        out[r] = grid.interp(row, read_at, rule);
    }
    return out;
}

namespace {

struct CrossFields {
    Eigen::ArrayXXd d2x, d2y, dxy_pos, dxy_neg;
};

// Interior difference fields on the (nx-2) x (ny-2) core. The cross term has
// two monotone variants; the vertex's covariance sign picks which one applies.
void difference_fields(const Eigen::ArrayXXd& u, double inv_h2, bool need_pos,
                       bool need_neg, CrossFields& f) {
    const Eigen::Index nx = u.rows(), ny = u.cols();
    const auto C = u.block(1, 1, nx - 2, ny - 2);
    const auto E = u.block(2, 1, nx - 2, ny - 2);
    const auto W = u.block(0, 1, nx - 2, ny - 2);
    const auto N = u.block(1, 2, nx - 2, ny - 2);
    const auto S = u.block(1, 0, nx - 2, ny - 2);
    f.d2x = (E + W - 2.0 * C) * inv_h2;
    f.d2y = (N + S - 2.0 * C) * inv_h2;
    if (need_pos) {
        const auto NE = u.block(2, 2, nx - 2, ny - 2);
        const auto SW = u.block(0, 0, nx - 2, ny - 2);
        f.dxy_pos = (2.0 * C + NE + SW - E - W - N - S) * (0.5 * inv_h2);
    }
    if (need_neg) {
        const auto SE = u.block(2, 0, nx - 2, ny - 2);
        const auto NW = u.block(0, 2, nx - 2, ny - 2);
        f.dxy_neg = (E + W + N + S - 2.0 * C - SE - NW) * (0.5 * inv_h2);
    }
}

}  // namespace

SolutionField2 solve_gheat_2d(const Payoff& phi, const CovarianceSet& sigma,
                              const SolverConfig& config) {
    const CellGrid g = CellGrid::centered(config.domain_half_width, config.space_step);
    Eigen::ArrayXXd u0(g.n, g.n);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) u0(i, j) = phi(g.coord(i), g.coord(j));
    }
    return solve_gheat_2d_values(std::move(u0), g, g, sigma, config);
}

SolutionField2 solve_gheat_2d_values(Eigen::ArrayXXd initial, const CellGrid& gx,
                                     const CellGrid& gy, const CovarianceSet& sigma,
                                     const SolverConfig& config) {
    config.validate_2d(sigma);
    if (gx.dx != gy.dx) {
        throw std::invalid_argument("solve_gheat_2d: grid must be square (dx == dy)");
    }
    if (initial.rows() != gx.n || initial.cols() != gy.n) {
        throw std::invalid_argument("solve_gheat_2d: size mismatch");
    }
    Eigen::ArrayXXd u = std::move(initial);
    const Eigen::Index nx = u.rows(), ny = u.cols();
    const double inv_h2 = 1.0 / (gx.dx * gx.dx);

    bool need_pos = false, need_neg = false;
    for (const auto& v : sigma.vertices()) {
        (v(0, 1) >= 0.0 ? need_pos : need_neg) = true;
    }

    CrossFields f;
    Eigen::ArrayXXd best, cand;
    double last_dt = 0.0;
    const long n_full = step_count(config.horizon, config.time_step, last_dt);
    long steps = 0;

    auto advance = [&](double dt) {
        difference_fields(u, inv_h2, need_pos, need_neg, f);
        bool first = true;
        for (const auto& v : sigma.vertices()) {
            const double a = v(0, 0), b = v(0, 1), c = v(1, 1);
            cand = a * f.d2x + c * f.d2y;
            if (b > 0.0) {
                cand += (2.0 * b) * f.dxy_pos;
            } else if (b < 0.0) {
                cand += (2.0 * b) * f.dxy_neg;
            }
            if (first) {
                best = cand;
                first = false;
            } else {
                best = best.max(cand);
            }
        }
        u.block(1, 1, nx - 2, ny - 2) += (0.5 * dt) * best;
        if (config.boundary == BoundaryRule::LinearExtrapolate) {
            u.row(0) = 2.0 * u.row(1) - u.row(2);
            u.row(nx - 1) = 2.0 * u.row(nx - 2) - u.row(nx - 3);
            u.col(0) = 2.0 * u.col(1) - u.col(2);
            u.col(ny - 1) = 2.0 * u.col(ny - 2) - u.col(ny - 3);
        }
    };

    for (long k = 0; k < n_full; ++k) {
        advance(config.time_step);
        if ((++steps & 63) == 0) check_finite(u, steps);
    }
    if (last_dt > 1e-14 * config.horizon) {
        advance(last_dt);
        ++steps;
    }
    check_finite(u, steps);

    SolutionField2 field;
    field.gx = gx;
    field.gy = gy;
    field.u = std::move(u);
    field.cfl_ratio = config.cfl_ratio_2d(sigma);
    field.n_steps = steps;
    field.boundary = config.boundary;
    return field;
}

double SolutionField2::at(double x, double y) const {
    // Bilinear read; out-of-range coordinates clamp to the edge cells.
    auto locate = [](const CellGrid& g, double z, int& j, double& w) {
        double s = (z - g.lo) / g.dx - 0.5;
        s = std::min(std::max(s, 0.0), static_cast<double>(g.n - 1));
        j = std::min(static_cast<int>(s), g.n - 2);
        w = s - j;
    };
    int i, j;
    double wx, wy;
    locate(gx, x, i, wx);
    locate(gy, y, j, wy);
    return (1 - wx) * ((1 - wy) * u(i, j) + wy * u(i, j + 1)) +
           wx * ((1 - wy) * u(i + 1, j) + wy * u(i + 1, j + 1));
}

namespace {
std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

std::string SolutionField1::to_csv() const {
    std::ostringstream os;
    os << "x,u\n";
    for (int j = 0; j < grid.n; ++j) {
        os << fmt_double(grid.coord(j)) << ',' << fmt_double(u[j]) << '\n';
    }
    return os.str();
}

std::string SolutionField2::to_csv() const {
    std::ostringstream os;
    os << "x,y,u\n";
    for (int i = 0; i < gx.n; ++i) {
        for (int j = 0; j < gy.n; ++j) {
            os << fmt_double(gx.coord(i)) << ',' << fmt_double(gy.coord(j)) << ','
               << fmt_double(u(i, j)) << '\n';
        }
    }
    return os.str();
}

}  // namespace gexp
