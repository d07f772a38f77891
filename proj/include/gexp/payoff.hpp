#pragma once

#include "gexp/uncertainty.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace gexp {

enum class Growth { BoundedLipschitz, LocallyLipschitzPolynomial };

/// Terminal payoff φ: ℝᵈ → ℝ, d = 1 or 2. The Lipschitz bound is advisory
/// metadata; nothing downstream infers or enforces it.
struct Payoff {
    std::function<double(double)> f1;
    std::function<double(double, double)> f2;
    std::optional<double> lipschitz_bound;
    Growth growth{Growth::LocallyLipschitzPolynomial};
    std::string name;

    int dim() const { return f2 ? 2 : 1; }
    double operator()(double x) const { return f1(x); }
    double operator()(double x, double y) const { return f2(x, y); }

    static Payoff of1(std::function<double(double)> f, std::string name = {},
                      std::optional<double> lip = std::nullopt,
                      Growth g = Growth::LocallyLipschitzPolynomial) {
        Payoff p;
        p.f1 = std::move(f);
        p.name = std::move(name);
        p.lipschitz_bound = lip;
        p.growth = g;
        return p;
    }
    static Payoff of2(std::function<double(double, double)> f, std::string name = {},
                      std::optional<double> lip = std::nullopt,
                      Growth g = Growth::LocallyLipschitzPolynomial) {
        Payoff p;
        p.f2 = std::move(f);
        p.name = std::move(name);
        p.lipschitz_bound = lip;
        p.growth = g;
        return p;
    }
};

/// Payoff of several real coordinates, used by the multi-variable reductions.
using PayoffN = std::function<double(std::span<const double>)>;

/// Largest sampled difference-quotient violation of the declared Lipschitz
/// bound on a test grid (≤ 0 means compliant up to the stated slack).
double lipschitz_violation(const Payoff& phi, double lo, double hi, int samples);

/// Ê[φ(η)] for a maximal-distributed η supported on Γ: max of φ over a grid
/// refinement of Γ with step `resolution`. Error ≤ lipschitz_bound·resolution
/// when the bound is supplied.
double maximal_expectation(const Payoff& phi, const MaximalSupport& gamma,
                           double resolution);

}  // namespace gexp
