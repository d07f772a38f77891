#pragma once

#include "gexp/paths.hpp"

#include <complex>
#include <optional>

namespace gexp {

/// Piecewise-constant integrand on the ensemble's step grid. Adapted by
/// construction when built from a prefix rule; an explicit value matrix must
/// declare its adaptedness and non-adapted processes are rejected by the
/// integral operators.
struct StepProcess {
    Eigen::ArrayXXd values;  // n_steps × n_paths
    bool adapted{true};

    static StepProcess constant(double c, int n_steps, int n_paths) {
        StepProcess p;
        p.values = Eigen::ArrayXXd::Constant(n_steps, n_paths, c);
        return p;
    }
    /// rule(k, b1-prefix, b2-prefix) with prefixes up to step k inclusive.
    static StepProcess from_rule(
        const std::function<double(int, std::span<const double>, std::span<const double>)>& rule,
        const PathEnsemble& paths);
    static StepProcess from_values(Eigen::ArrayXXd values, bool adapted);
};

struct ComplexStepProcess {
    StepProcess re, im;
    static ComplexStepProcess constant(std::complex<double> c, int n_steps, int n_paths) {
        return {StepProcess::constant(c.real(), n_steps, n_paths),
                StepProcess::constant(c.imag(), n_steps, n_paths)};
    }
};

/// Left-endpoint Itô sum Σ ξ_k·(B_{k+1} − B_k) per path over component `comp`
/// (0 → B¹, 1 → B²). Exact discrete algebra, no quadrature error.
Eigen::ArrayXd ito_integral(const StepProcess& eta, const PathEnsemble& paths,
                            int comp = 0);

/// Same restricted to steps [k0, k1).
Eigen::ArrayXd ito_integral_range(const StepProcess& eta, const PathEnsemble& paths,
                                  int k0, int k1, int comp = 0);

/// Complex integral ∫η dB expanded into the four real integrals:
/// (∫η¹dB¹ − ∫η²dB²) + i(∫η¹dB² + ∫η²dB¹).
struct ComplexPerPath {
    Eigen::ArrayXd re, im;
};
ComplexPerPath ito_integral_complex(const ComplexStepProcess& eta,
                                    const PathEnsemble& paths);

/// Σ(ΔB)² per path for one component.
Eigen::ArrayXd quadratic_variation(const PathEnsemble& paths, int comp = 0);

/// Σ ΔB^a·ΔB^b per path (direct product sum).
Eigen::ArrayXd mutual_variation(const PathEnsemble& paths, int comp_a, int comp_b);

/// ¼(⟨Bᵃ+Bᵇ⟩ − ⟨Bᵃ−Bᵇ⟩) per path; algebraically equal to the direct sum.
Eigen::ArrayXd mutual_variation_polarized(const PathEnsemble& paths, int comp_a,
                                          int comp_b);

/// Complex ⟨B⟩ = ⟨B¹⟩ − ⟨B²⟩ + 2i⟨B¹,B²⟩, both assembled and accumulated
/// directly as Σ(ΔB)² (the two agree to rounding).
ComplexPerPath quadratic_variation_complex(const PathEnsemble& paths);

/// ∫η d⟨B⟩ per path (complex), with Δ⟨B⟩_k = (ΔB_k)².
ComplexPerPath qv_integral_complex(const ComplexStepProcess& eta,
                                   const PathEnsemble& paths);

/// Sample mean with a 99% normal confidence half-width.
struct MeanCI {
    double mean{0.0};
    double half_width{0.0};
    long n{0};
};
MeanCI mean_ci(const Eigen::ArrayXd& samples);

/// Per-path functional of a simulated path (column views plus dt).
using PathFunctional = std::function<double(
    double dt, Eigen::Ref<const Eigen::ArrayXd> b1, Eigen::Ref<const Eigen::ArrayXd> b2)>;

struct ScenarioResult {
    double value{0.0};        // max over controls of the MC mean
    double half_width{0.0};   // 99% half-width of the winning control
    std::string winning_control;
    std::vector<std::pair<std::string, MeanCI>> per_control;
};

/// Statistical lower bound for the sup over volatility scenarios: max over the
/// control family of the MC mean of the functional. Generation is blocked so
/// ensembles of 10⁵+ paths never materialize; per-path streams are keyed by
/// the global path index, so blocking does not change results.
ScenarioResult scenario_sup_expect(const PathFunctional& f,
                                   const std::vector<Control>& controls,
                                   const SigmaSpec& sigma, double dt, int n_steps,
                                   int n_paths, std::uint64_t seed,
                                   int block_paths = 8192);

/// Terminal-payoff convenience: f(B_T) (or f(B¹_T, B²_T) in 2D).
ScenarioResult scenario_sup_terminal(const Payoff& phi,
                                     const std::vector<Control>& controls,
                                     const SigmaSpec& sigma, double dt, int n_steps,
                                     int n_paths, std::uint64_t seed);

/// One audited inequality/identity.
struct AuditRow {
    std::string inequality;  // the law being checked, as a formula
    double lhs{0.0};
    double rhs{0.0};
    double margin{0.0};      // lhs − rhs (≤ 0 means satisfied before noise)
    double half_width{0.0};  // combined statistical tolerance
    bool pass{false};
};

/// Built-in bounded adapted integrand catalog for the audits.
std::vector<std::string> eta_catalog();
StepProcess make_eta(const std::string& key, const PathEnsemble& paths, int comp = 0);
ComplexStepProcess make_eta_complex(const std::string& key, const PathEnsemble& paths);

/// Audits, per integrand: zero-mean of ∫η dB, the variance bound
/// E[(∫η dB)²] ≤ σ̄²·E[∫η² dt], the complex bound with constant 16K,
/// the d⟨B⟩ bound with constant 4(σ̄₁²+σ̄₃²+2σ̄₂²), and the isometry identity
/// E[(∫η dB)²] = E[∫η² d⟨B⟩]. Scenario-sup estimates on both sides; a row
/// fails only when the margin exceeds the combined 99% half-width.
std::vector<AuditRow> bound_audit_1d(const std::string& eta_key,
                                     const VolatilityInterval& iv, double dt,
                                     int n_steps, int n_paths, std::uint64_t seed);
std::vector<AuditRow> bound_audit_complex(const std::string& eta_key,
                                          const CovarianceSet& sigma, double dt,
                                          int n_steps, int n_paths,
                                          std::uint64_t seed);

/// Twice-differentiable test function with explicit derivatives.
struct ScalarC2 {
    std::function<double(double)> f, d1, d2;
};

/// Real Itô process specification dX = α dt + η d⟨B⟩ + β dB (1D driver).
struct ItoSpec1 {
    StepProcess alpha, eta, beta;
    double x0{0.0};
};

/// Φ(X_T) − Φ(X_0) minus the discrete Itô right-hand side per path; the
/// L²-norm vanishes as dt → 0 and is exactly zero for affine/quadratic cases.
Eigen::ArrayXd ito_formula_residual_real(const ScalarC2& Phi, const ItoSpec1& X,
                                         const PathEnsemble& paths);

double l2_norm(const Eigen::ArrayXd& per_path);

}  // namespace gexp
