#pragma once

#include "gexp/grid.hpp"
#include "gexp/payoff.hpp"
#include "gexp/uncertainty.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <string>

namespace gexp {

/// Explicit-scheme configuration. The grid covers [-L, L] per axis with step
/// dx; time advances by dt (the final step shrinks to land on the horizon).
struct SolverConfig {
    double domain_half_width{4.0};  // L
    double space_step{0.05};        // dx
    double time_step{1e-3};         // dt
    double horizon{1.0};            // t
    BoundaryRule boundary{BoundaryRule::ClampPayoff};

    /// CFL ratio dt·σ̄²/dx² (1D) or dt·(σ̄₁²+σ̄₃²+2|σ̄₂²|)/dx² (2D); the
    /// scheme is monotone only when this is ≤ ½.
    double cfl_ratio_1d(const VolatilityInterval& iv) const {
        return time_step * iv.sigma_hi_sq / (space_step * space_step);
    }
    double cfl_ratio_2d(const CovarianceSet& sigma) const {
        const double s = sigma.max_abs_var_x() + sigma.max_abs_var_y() +
                         2.0 * sigma.max_abs_cov();
        return time_step * s / (space_step * space_step);
    }

    /// Rejects configurations that would break monotonicity (CFL > ½) or
    /// truncate the domain inside the 4σ̄√t support heuristic.
    void validate_1d(const VolatilityInterval& iv) const;
    void validate_2d(const CovarianceSet& sigma) const;

    /// Largest dt with ratio ≤ `ratio` for the given diffusion bound.
    static double stable_dt(double dx, double sigma_hi_sq, double ratio = 0.45) {
        return ratio * dx * dx / std::max(sigma_hi_sq, 1e-300);
    }
};

SolverConfig solver_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolverConfig& c);

/// Grid-sampled solution u(t, ·) of the nonlinear heat flow at the horizon.
struct SolutionField1 {
    CellGrid grid;
    Eigen::ArrayXd u;
    double cfl_ratio{0.0};
    long n_steps{0};
    BoundaryRule boundary{BoundaryRule::ClampPayoff};

    double at(double x) const { return grid.interp(u, x, boundary); }
    std::string to_csv() const;
};

struct SolutionField2 {
    CellGrid gx, gy;
    Eigen::ArrayXXd u;  // (nx, ny)
    double cfl_ratio{0.0};
    long n_steps{0};
    BoundaryRule boundary{BoundaryRule::ClampPayoff};

    double at(double x, double y) const;
    std::string to_csv() const;
};

/// Viscosity solution of ∂ₜu = g(∂ₓₓu) with u(0,·) = φ by forward Euler on
/// central second differences. Monotone under the validated CFL bound, hence
/// convergent (consistent + stable + monotone). Ê[φ(x + √t·X)] = u(t, x).
SolutionField1 solve_gheat_1d(const Payoff& phi, const VolatilityInterval& iv,
                              const SolverConfig& config);

/// Same flow started from nodal values instead of a callable (used for
/// restarts and stage hand-offs).
SolutionField1 solve_gheat_1d_values(Eigen::ArrayXd initial, const CellGrid& grid,
                                     const VolatilityInterval& iv,
                                     const SolverConfig& config);

/// 2D flow ∂ₜu = G(H u) with the discrete Hessian taken per vertex: central
/// second differences plus the sign-adapted diagonal stencil for the cross
/// term. Requires every vertex diagonally dominant (σ₁², σ₃² ≥ |σ₂²|).
SolutionField2 solve_gheat_2d(const Payoff& phi, const CovarianceSet& sigma,
                              const SolverConfig& config);

SolutionField2 solve_gheat_2d_values(Eigen::ArrayXXd initial, const CellGrid& gx,
                                     const CellGrid& gy, const CovarianceSet& sigma,
                                     const SolverConfig& config);

/// Advances every row of `rows` in place (one independent 1D problem per row,
/// shared grid and horizon). Rows whose initial data is affine are stationary
/// under the scheme and are left untouched instead of being stepped.
void solve_rows_evolve(Eigen::ArrayXXd& rows, const CellGrid& grid,
                       const VolatilityInterval& iv, double horizon, double dt,
                       BoundaryRule rule = BoundaryRule::ClampPayoff);

/// Evolves `rows` and reads each at x = `read_at`.
Eigen::ArrayXd solve_rows_read(Eigen::ArrayXXd rows, const CellGrid& grid,
                               const VolatilityInterval& iv, double horizon,
                               double dt, double read_at,
                               BoundaryRule rule = BoundaryRule::ClampPayoff);

}  // namespace gexp
