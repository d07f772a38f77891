#pragma once

#include "gexp/uncertainty.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gexp {

/// Adapted volatility control: picks a vertex index from the step number and
/// the path prefix (values up to the current step inclusive). Feedback rules
/// never see the future by construction.
struct Control {
    std::string name;
    std::function<int(int step, std::span<const double> b1,
                      std::span<const double> b2)>
        pick;
};

Control const_control(int vertex, std::string name);
Control bang_bang_control(int even_vertex, int odd_vertex);
/// `hi_vertex` when signal(prefix) ≥ 0, else `lo_vertex`.
Control sign_feedback_control(
    int lo_vertex, int hi_vertex,
    std::function<double(std::span<const double> b1, std::span<const double> b2)> signal,
    std::string name);

/// Named control families of increasing richness over a vertex list.
std::vector<Control> control_family_constants(int n_vertices);
std::vector<Control> control_family_bang_bang(int n_vertices);
std::vector<Control> control_family_feedback(int n_vertices, bool two_d);
/// constants ∪ bang-bang ∪ sign-feedback.
std::vector<Control> control_family_full(int n_vertices, bool two_d);

/// Simulated ensemble: B₀ = 0 on every path; column j holds path j.
/// Reproducible: identical (seed, config, control) gives identical arrays.
struct PathEnsemble {
    double dt{0.0};
    int n_steps{0};
    int n_paths{0};
    std::uint64_t seed{0};
    bool two_d{false};
    std::vector<Eigen::Matrix2d> sqrt_vertices;  // per-vertex PSD square roots
    Eigen::ArrayXXd b1;                          // (n_steps+1) × n_paths
    Eigen::ArrayXXd b2;                          // empty when 1D
    Eigen::ArrayXXi vertex;                      // n_steps × n_paths

    std::string to_csv() const;
};

/// 1D sampler: vertex list {σ̲², σ̄²} (one entry when degenerate);
/// ΔB_k = σ·√dt·ζ_k with ζ i.i.d. standard normal, σ² picked by the control.
PathEnsemble sample_paths_1d(const Control& control, const VolatilityInterval& iv,
                             double dt, int n_steps, int n_paths,
                             std::uint64_t seed, int first_path_index = 0);

/// 2D sampler over CovarianceSet vertices: ΔB_k = Λ^{1/2}·√dt·ζ_k.
PathEnsemble sample_paths_2d(const Control& control, const CovarianceSet& sigma,
                             double dt, int n_steps, int n_paths,
                             std::uint64_t seed, int first_path_index = 0);

/// Closed-form PSD square root of a 2×2 covariance vertex.
Eigen::Matrix2d sqrt_psd_2x2(const Eigen::Matrix2d& m);

/// Number of σ² choices a 1D interval exposes (1 when degenerate, else 2).
inline int vertex_count_1d(const VolatilityInterval& iv) {
    return iv.sigma_hi_sq == iv.sigma_lo_sq ? 1 : 2;
}

}  // namespace gexp
