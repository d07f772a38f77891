#pragma once

#include <complex>
#include <functional>
#include <string>

namespace gexp {

using Complex = std::complex<double>;

/// Complex function f = u + iv given by its real components and (optionally)
/// exact partial derivatives. Missing first derivatives fall back to central
/// differences with step `fd_step`; second derivatives are required by the
/// Itô machinery and are rejected when absent.
struct AnalyticFunction {
    std::string name;
    std::function<double(double, double)> u, v;
    std::function<double(double, double)> ux, uy, vx, vy;
    std::function<double(double, double)> uxx, uxy, uyy, vxx, vxy, vyy;
    bool analytic_flag{false};
    double fd_step{1e-5};

    Complex operator()(Complex z) const {
        return {u(z.real(), z.imag()), v(z.real(), z.imag())};
    }
    bool has_first_derivatives() const { return ux && uy && vx && vy; }
    bool has_second_derivatives() const {
        return uxx && uxy && uyy && vxx && vxy && vyy;
    }
};

/// ∂f = ½(f_x − i·f_y), ∂̄f = ½(f_x + i·f_y) evaluated at a point.
struct WirtingerPair {
    Complex d;     // ∂f
    Complex dbar;  // ∂̄f
};

WirtingerPair wirtinger(const AnalyticFunction& f, Complex z);

/// Second-order operators ∂∂f, ∂̄∂̄f, ∂∂̄f (= ¼Δf) at a point.
struct Wirtinger2 {
    Complex dd, dbar_dbar, d_dbar;
};
Wirtinger2 wirtinger2(const AnalyticFunction& f, Complex z);

/// |u_x − v_y| + |u_y + v_x| at a point: zero iff the Cauchy–Riemann
/// equations hold there, the operative analyticity test.
double cauchy_riemann_residual(const AnalyticFunction& f, Complex z);

/// Largest Cauchy–Riemann residual over an axis-aligned sample box.
double cauchy_riemann_residual_box(const AnalyticFunction& f, double half_width,
                                   int samples_per_axis);

/// Built-in catalog with exact derivatives: "z", "z2", "z3", "exp",
/// "inv" (1/(z−a) with the pole held off the working box).
AnalyticFunction analytic_catalog(const std::string& key);

/// f'(z) for an analytic f (= ∂f under the standard operators).
Complex analytic_derivative(const AnalyticFunction& f, Complex z);

}  // namespace gexp
