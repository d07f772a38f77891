#include "gexp/paths.hpp"

#include "gexp/rng.hpp"

#include <cmath>
#include <sstream>

namespace gexp {

Control const_control(int vertex, std::string name) {
    return {std::move(name),
            [vertex](int, std::span<const double>, std::span<const double>) {
                return vertex;
            }};
}

Control bang_bang_control(int even_vertex, int odd_vertex) {
    return {"bang-bang(" + std::to_string(even_vertex) + "," +
                std::to_string(odd_vertex) + ")",
            [even_vertex, odd_vertex](int step, std::span<const double>,
                                      std::span<const double>) {
                return step % 2 == 0 ? even_vertex : odd_vertex;
            }};
}

Control sign_feedback_control(
    int lo_vertex, int hi_vertex,
    std::function<double(std::span<const double>, std::span<const double>)> signal,
    std::string name) {
    return {std::move(name),
            [lo_vertex, hi_vertex, signal = std::move(signal)](
                int, std::span<const double> b1, std::span<const double> b2) {
                return signal(b1, b2) >= 0.0 ? hi_vertex : lo_vertex;
            }};
}

std::vector<Control> control_family_constants(int n_vertices) {
    std::vector<Control> out;
    for (int v = 0; v < n_vertices; ++v) {
        out.push_back(const_control(v, "const(" + std::to_string(v) + ")"));
    }
    return out;
}

std::vector<Control> control_family_bang_bang(int n_vertices) {
    std::vector<Control> out;
    for (int a = 0; a < n_vertices; ++a) {
        for (int b = a + 1; b < n_vertices; ++b) {
            out.push_back(bang_bang_control(a, b));
        }
    }
    return out;
}

std::vector<Control> control_family_feedback(int n_vertices, bool two_d) {
    std::vector<Control> out;
    if (n_vertices < 2) return out;
    const int lo = 0, hi = n_vertices - 1;
    auto cur1 = [](std::span<const double> b1, std::span<const double>) {
        return b1.empty() ? 0.0 : b1.back();
    };
    auto neg1 = [cur1](std::span<const double> b1, std::span<const double> b2) {
        return -cur1(b1, b2);
    };
    out.push_back(sign_feedback_control(lo, hi, cur1, "feedback(sign B1)"));
    out.push_back(sign_feedback_control(lo, hi, neg1, "feedback(-sign B1)"));
    if (two_d) {
        auto cur2 = [](std::span<const double>, std::span<const double> b2) {
            return b2.empty() ? 0.0 : b2.back();
        };
        out.push_back(sign_feedback_control(lo, hi, cur2, "feedback(sign B2)"));
    }
    return out;
}

std::vector<Control> control_family_full(int n_vertices, bool two_d) {
    auto out = control_family_constants(n_vertices);
    for (auto& c : control_family_bang_bang(n_vertices)) out.push_back(std::move(c));
    for (auto& c : control_family_feedback(n_vertices, two_d)) out.push_back(std::move(c));
    return out;
}

Eigen::Matrix2d sqrt_psd_2x2(const Eigen::Matrix2d& m) {
    const double det = std::max(m.determinant(), 0.0);
    const double s = std::sqrt(det);
    const double tau_sq = m.trace() + 2.0 * s;
    if (tau_sq <= 0.0) return Eigen::Matrix2d::Zero();
    return (m + s * Eigen::Matrix2d::Identity()) / std::sqrt(tau_sq);
}

PathEnsemble sample_paths_1d(const Control& control, const VolatilityInterval& iv,
                             double dt, int n_steps, int n_paths,
                             std::uint64_t seed, int first_path_index) {
    iv.validate();
    if (!(dt > 0.0) || n_steps < 1 || n_paths < 1) {
        throw std::invalid_argument("sample_paths: need dt > 0, n_steps, n_paths >= 1");
    }
    std::vector<double> sig;
    sig.push_back(std::sqrt(iv.sigma_lo_sq));
    if (vertex_count_1d(iv) == 2) sig.push_back(std::sqrt(iv.sigma_hi_sq));

    PathEnsemble e;
    e.dt = dt;
    e.n_steps = n_steps;
    e.n_paths = n_paths;
    e.seed = seed;
    e.two_d = false;
    e.b1.setZero(n_steps + 1, n_paths);
    e.vertex.setZero(n_steps, n_paths);

    const double sqrt_dt = std::sqrt(dt);
    for (int p = 0; p < n_paths; ++p) {
        NormalStream rng(seed, static_cast<std::uint64_t>(first_path_index + p));
        double* col = e.b1.col(p).data();
        for (int k = 0; k < n_steps; ++k) {
            const int v = control.pick(k, std::span<const double>(col, k + 1), {});
            if (v < 0 || v >= static_cast<int>(sig.size())) {
                throw std::out_of_range("control picked invalid vertex index");
            }
            const double z = rng.next_normal();
            col[k + 1] = col[k] + sig[static_cast<std::size_t>(v)] * sqrt_dt * z;
            e.vertex(k, p) = v;
        }
    }
    return e;
}

PathEnsemble sample_paths_2d(const Control& control, const CovarianceSet& sigma,
                             double dt, int n_steps, int n_paths,
                             std::uint64_t seed, int first_path_index) {
    sigma.validate();
    if (!(dt > 0.0) || n_steps < 1 || n_paths < 1) {
        throw std::invalid_argument("sample_paths: need dt > 0, n_steps, n_paths >= 1");
    }
    PathEnsemble e;
    e.dt = dt;
    e.n_steps = n_steps;
    e.n_paths = n_paths;
    e.seed = seed;
    e.two_d = true;
    for (const auto& v : sigma.vertices()) e.sqrt_vertices.push_back(sqrt_psd_2x2(v));
    e.b1.setZero(n_steps + 1, n_paths);
    e.b2.setZero(n_steps + 1, n_paths);
    e.vertex.setZero(n_steps, n_paths);

    const double sqrt_dt = std::sqrt(dt);
    for (int p = 0; p < n_paths; ++p) {
        NormalStream rng(seed, static_cast<std::uint64_t>(first_path_index + p));
        double* c1 = e.b1.col(p).data();
        double* c2 = e.b2.col(p).data();
        for (int k = 0; k < n_steps; ++k) {
            const int v = control.pick(k, std::span<const double>(c1, k + 1),
                                       std::span<const double>(c2, k + 1));
            if (v < 0 || v >= static_cast<int>(e.sqrt_vertices.size())) {
                throw std::out_of_range("control picked invalid vertex index");
            }
            const double z1 = rng.next_normal();
            const double z2 = rng.next_normal();
            const Eigen::Matrix2d& rt = e.sqrt_vertices[static_cast<std::size_t>(v)];
            c1[k + 1] = c1[k] + sqrt_dt * (rt(0, 0) * z1 + rt(0, 1) * z2);
            c2[k + 1] = c2[k] + sqrt_dt * (rt(1, 0) * z1 + rt(1, 1) * z2);
            e.vertex(k, p) = v;
        }
    }
    return e;
}

std::string PathEnsemble::to_csv() const {
    std::ostringstream os;
    os << (two_d ? "path,step,t,B1,B2,vertex_index\n" : "path,step,t,B1,vertex_index\n");
    char buf[96];
    for (int p = 0; p < n_paths; ++p) {
        for (int k = 0; k <= n_steps; ++k) {
            const int v = k < n_steps ? vertex(k, p) : vertex(n_steps - 1, p);
            if (two_d) {
                std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%d\n", p, k,
                              k * dt, b1(k, p), b2(k, p), v);
            } else {
                std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%d\n", p, k, k * dt,
                              b1(k, p), v);
            }
            os << buf;
        }
    }
    return os.str();
}

}  // namespace gexp
