#include "gexp/wirtinger.hpp"

#include <cmath>
#include <stdexcept>

namespace gexp {

namespace {

// Central difference in the requested direction when exact partials are absent.
double fd(const std::function<double(double, double)>& g, double x, double y,
          bool in_x, double h) {
    return in_x ? (g(x + h, y) - g(x - h, y)) / (2.0 * h)
                : (g(x, y + h) - g(x, y - h)) / (2.0 * h);
}

struct Gradients {
    double ux, uy, vx, vy;
};

Gradients gradients(const AnalyticFunction& f, double x, double y) {
    if (f.has_first_derivatives()) {
        return {f.ux(x, y), f.uy(x, y), f.vx(x, y), f.vy(x, y)};
    }
    const double h = f.fd_step;
    return {fd(f.u, x, y, true, h), fd(f.u, x, y, false, h),
            fd(f.v, x, y, true, h), fd(f.v, x, y, false, h)};
}

}  // namespace

WirtingerPair wirtinger(const AnalyticFunction& f, Complex z) {
    const auto g = gradients(f, z.real(), z.imag());
    const Complex fx(g.ux, g.vx);
    const Complex fy(g.uy, g.vy);
    const Complex i(0.0, 1.0);
    return {0.5 * (fx - i * fy), 0.5 * (fx + i * fy)};
}

Wirtinger2 wirtinger2(const AnalyticFunction& f, Complex z) {
    if (!f.has_second_derivatives()) {
        throw std::invalid_argument("wirtinger2: second derivatives missing for '" +
                                    f.name + "'");
    }
    const double x = z.real(), y = z.imag();
    const Complex fxx(f.uxx(x, y), f.vxx(x, y));
    const Complex fxy(f.uxy(x, y), f.vxy(x, y));
    const Complex fyy(f.uyy(x, y), f.vyy(x, y));
    const Complex i(0.0, 1.0);
    Wirtinger2 w;
    w.dd = 0.25 * (fxx - fyy - 2.0 * i * fxy);
    w.dbar_dbar = 0.25 * (fxx - fyy + 2.0 * i * fxy);
    w.d_dbar = 0.25 * (fxx + fyy);
    return w;
}

double cauchy_riemann_residual(const AnalyticFunction& f, Complex z) {
    const auto g = gradients(f, z.real(), z.imag());
    return std::abs(g.ux - g.vy) + std::abs(g.uy + g.vx);
}

double cauchy_riemann_residual_box(const AnalyticFunction& f, double half_width,
                                   int samples_per_axis) {
    double worst = 0.0;
    const int n = std::max(2, samples_per_axis);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = -half_width + 2.0 * half_width * i / (n - 1);
            const double y = -half_width + 2.0 * half_width * j / (n - 1);
            worst = std::max(worst, cauchy_riemann_residual(f, {x, y}));
        }
    }
    return worst;
}

namespace {

AnalyticFunction from_polynomial(const std::string& name, int power) {
    // z^p expanded through complex arithmetic; derivatives are exact.
    auto zp = [](double x, double y, int p) { return std::pow(Complex(x, y), p); };
    AnalyticFunction f;
    f.name = name;
    f.analytic_flag = true;
    f.u = [zp, power](double x, double y) { return zp(x, y, power).real(); };
    f.v = [zp, power](double x, double y) { return zp(x, y, power).imag(); };
    auto d1 = [zp, power](double x, double y) {
        return power == 0 ? Complex(0, 0) : double(power) * zp(x, y, power - 1);
    };
    auto d2 = [zp, power](double x, double y) {
        return power < 2 ? Complex(0, 0)
                         : double(power * (power - 1)) * zp(x, y, power - 2);
    };
    // analytic: f_x = f', f_y = i f'; f_xx = f'', f_xy = i f'', f_yy = -f''
    f.ux = [d1](double x, double y) { return d1(x, y).real(); };
    f.vx = [d1](double x, double y) { return d1(x, y).imag(); };
    f.uy = [d1](double x, double y) { return -d1(x, y).imag(); };
    f.vy = [d1](double x, double y) { return d1(x, y).real(); };
    f.uxx = [d2](double x, double y) { return d2(x, y).real(); };
    f.vxx = [d2](double x, double y) { return d2(x, y).imag(); };
    f.uxy = [d2](double x, double y) { return -d2(x, y).imag(); };
    f.vxy = [d2](double x, double y) { return d2(x, y).real(); };
    f.uyy = [d2](double x, double y) { return -d2(x, y).real(); };
    f.vyy = [d2](double x, double y) { return -d2(x, y).imag(); };
    return f;
}

AnalyticFunction from_entire(const std::string& name,
                             std::function<Complex(Complex)> fz,
                             std::function<Complex(Complex)> d1,
                             std::function<Complex(Complex)> d2) {
    AnalyticFunction f;
    f.name = name;
    f.analytic_flag = true;
    f.u = [fz](double x, double y) { return fz({x, y}).real(); };
    f.v = [fz](double x, double y) { return fz({x, y}).imag(); };
    f.ux = [d1](double x, double y) { return d1({x, y}).real(); };
    f.vx = [d1](double x, double y) { return d1({x, y}).imag(); };
    f.uy = [d1](double x, double y) { return -d1({x, y}).imag(); };
    f.vy = [d1](double x, double y) { return d1({x, y}).real(); };
    f.uxx = [d2](double x, double y) { return d2({x, y}).real(); };
    f.vxx = [d2](double x, double y) { return d2({x, y}).imag(); };
    f.uxy = [d2](double x, double y) { return -d2({x, y}).imag(); };
    f.vxy = [d2](double x, double y) { return d2({x, y}).real(); };
    f.uyy = [d2](double x, double y) { return -d2({x, y}).real(); };
    f.vyy = [d2](double x, double y) { return -d2({x, y}).imag(); };
    return f;
}

}  // namespace

AnalyticFunction analytic_catalog(const std::string& key) {
    if (key == "z") return from_polynomial("z", 1);
    if (key == "z2") return from_polynomial("z2", 2);
    if (key == "z3") return from_polynomial("z3", 3);
    if (key == "exp") {
        auto e = [](Complex z) { return std::exp(z); };
        return from_entire("exp", e, e, e);
    }
    if (key == "inv") {
        // pole at 6+6i stays at distance > 2.8 from the working box [-4,4]^2
        const Complex a(6.0, 6.0);
        return from_entire(
            "inv", [a](Complex z) { return 1.0 / (z - a); },
            [a](Complex z) { return -1.0 / std::pow(z - a, 2); },
            [a](Complex z) { return 2.0 / std::pow(z - a, 3); });
    }
    throw std::invalid_argument("analytic_catalog: unknown key '" + key + "'");
}

Complex analytic_derivative(const AnalyticFunction& f, Complex z) {
    return wirtinger(f, z).d;
}

}  // namespace gexp
