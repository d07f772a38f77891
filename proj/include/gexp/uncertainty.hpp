#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <stdexcept>
#include <vector>

namespace gexp {

/// Variance band [σ̲², σ̄²] of a one-dimensional volatility-uncertain driver.
struct VolatilityInterval {
    double sigma_lo_sq{0.0};
    double sigma_hi_sq{1.0};

    void validate() const {
        if (!(sigma_lo_sq >= 0.0) || !(sigma_hi_sq >= sigma_lo_sq) ||
            !std::isfinite(sigma_hi_sq)) {
            throw std::invalid_argument(
                "VolatilityInterval: need 0 <= sigma_lo_sq <= sigma_hi_sq < inf");
        }
    }
};

/// Compact convex covariance set Σ ⊂ S₂⁺, stored by its vertex list.
/// Any linear functional of Λ attains its extremum at a vertex, so every
/// sup over Σ below is a max over `vertices`.
class CovarianceSet {
public:
    CovarianceSet() = default;
    explicit CovarianceSet(std::vector<Eigen::Matrix2d> vertices)
        : vertices_(std::move(vertices)) {
        validate();
    }

    const std::vector<Eigen::Matrix2d>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }

    void validate() const;

    // Componentwise bounds over the vertex list.
    double max_var_x() const { return max_entry(0, 0, false); }  // sup Λ₁₁
    double max_var_y() const { return max_entry(1, 1, false); }  // sup Λ₂₂
    double min_var_x() const { return min_entry(0, 0); }
    double min_var_y() const { return min_entry(1, 1); }
    double max_abs_var_x() const { return max_entry(0, 0, true); }   // sup |σ₁²|
    double max_abs_cov() const { return max_entry(0, 1, true); }     // sup |σ₂²|
    double max_abs_var_y() const { return max_entry(1, 1, true); }   // sup |σ₃²|

    /// Largest variance seen along either axis; used for CFL and domain sizing.
    double max_var() const { return std::max(max_var_x(), max_var_y()); }

    /// True when every vertex satisfies σ₁², σ₃² ≥ |σ₂²| (the 2D monotone
    /// stencil requirement).
    bool diagonally_dominant() const;

private:
    double max_entry(int i, int j, bool absolute) const;
    double min_entry(int i, int j) const;

    std::vector<Eigen::Matrix2d> vertices_;
};

/// Two-vertex set {σ̲²·I, σ̄²·I}: equal component rates, zero covariance.
CovarianceSet make_conformal_set(const VolatilityInterval& iv);

/// Axis-aligned box of diagonal matrices diag(σ₁², σ₃²) with σ₁² ∈ [x], σ₃² ∈ [y].
CovarianceSet make_diagonal_box(const VolatilityInterval& ivx,
                                const VolatilityInterval& ivy);

/// Generator of the 1D nonlinear heat flow:
///   g(α) = ½(σ̄²·α⁺ − σ̲²·α⁻).
/// Positively homogeneous and subadditive in α.
inline double g_scalar(double alpha, const VolatilityInterval& iv) {
    return 0.5 * (iv.sigma_hi_sq * std::max(alpha, 0.0) +
                  iv.sigma_lo_sq * std::min(alpha, 0.0));
}

/// Matrix generator G(A) = ½·max over vertices of tr(A·Λ).
/// Rejects non-symmetric A.
double g_matrix(const Eigen::Matrix2d& a, const CovarianceSet& sigma);

/// Support of a maximal distribution: an axis-aligned box [lo, hi] (d = 1 or 2),
/// or the convex hull of an explicit finite point list.
struct MaximalSupport {
    Eigen::VectorXd lo;          // box corners; ignored when points non-empty
    Eigen::VectorXd hi;
    std::vector<Eigen::VectorXd> points;

    static MaximalSupport interval(double lo, double hi);
    static MaximalSupport box2(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);
    static MaximalSupport hull(std::vector<Eigen::VectorXd> pts);

    int dim() const;
    void validate() const;
};

// --- JSON wire format -------------------------------------------------------
//
// {"kind":"interval","sigma_lo_sq":a,"sigma_hi_sq":b}
// {"kind":"conformal","sigma_lo_sq":a,"sigma_hi_sq":b}
// {"kind":"vertices","vertices":[[[a,b],[b,c]], ...]}

struct SigmaSpec {
    enum class Kind { Interval, Conformal, Vertices };
    Kind kind{Kind::Interval};
    VolatilityInterval interval;
    CovarianceSet set;

    bool is_interval() const { return kind == Kind::Interval; }
    /// 2×2 set view; an interval spec is promoted to its conformal set.
    CovarianceSet as_set() const {
        return is_interval() ? make_conformal_set(interval) : set;
    }
};

nlohmann::json to_json(const SigmaSpec& spec);
SigmaSpec sigma_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VolatilityInterval& iv);
nlohmann::json to_json(const CovarianceSet& set);

}  // namespace gexp
