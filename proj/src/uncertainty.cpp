#include "gexp/uncertainty.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace gexp {

namespace {
constexpr double kPsdSlack = 1e-10;
}

void CovarianceSet::validate() const {
    if (vertices_.empty()) {
        throw std::invalid_argument("CovarianceSet: vertex list must be non-empty");
    }
    for (const auto& v : vertices_) {
        if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw std::invalid_argument("CovarianceSet: vertex not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(v);
        if (es.eigenvalues().minCoeff() < -kPsdSlack) {
            throw std::invalid_argument("CovarianceSet: vertex not positive semidefinite");
        }
        if (!v.allFinite()) {
            throw std::invalid_argument("CovarianceSet: vertex has non-finite entries");
        }
    }
}

double CovarianceSet::max_entry(int i, int j, bool absolute) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices_) {
        const double e = absolute ? std::abs(v(i, j)) : v(i, j);
        m = std::max(m, e);
    }
    return m;
}

double CovarianceSet::min_entry(int i, int j) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : vertices_) m = std::min(m, v(i, j));
    return m;
}

bool CovarianceSet::diagonally_dominant() const {
    for (const auto& v : vertices_) {
        const double b = std::abs(v(0, 1));
        if (v(0, 0) < b - 1e-15 || v(1, 1) < b - 1e-15) return false;
    }
    return true;
}

CovarianceSet make_conformal_set(const VolatilityInterval& iv) {
    iv.validate();
    std::vector<Eigen::Matrix2d> verts;
    verts.push_back(iv.sigma_lo_sq * Eigen::Matrix2d::Identity());
    if (iv.sigma_hi_sq != iv.sigma_lo_sq) {
        verts.push_back(iv.sigma_hi_sq * Eigen::Matrix2d::Identity());
    }
    return CovarianceSet(std::move(verts));
}

CovarianceSet make_diagonal_box(const VolatilityInterval& ivx,
                                const VolatilityInterval& ivy) {
    ivx.validate();
    ivy.validate();
    std::vector<Eigen::Matrix2d> verts;
    for (double a : {ivx.sigma_lo_sq, ivx.sigma_hi_sq}) {
        for (double c : {ivy.sigma_lo_sq, ivy.sigma_hi_sq}) {
            Eigen::Matrix2d v = Eigen::Matrix2d::Zero();
            v(0, 0) = a;
            v(1, 1) = c;
            verts.push_back(v);
        }
    }
    return CovarianceSet(std::move(verts));
}

double g_matrix(const Eigen::Matrix2d& a, const CovarianceSet& sigma) {
    if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("g_matrix: A must be symmetric");
    }
    sigma.validate();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : sigma.vertices()) {
        best = std::max(best, (a * v).trace());
    }
    return 0.5 * best;
}

MaximalSupport MaximalSupport::interval(double lo, double hi) {
    MaximalSupport s;
    s.lo = Eigen::VectorXd::Constant(1, lo);
    s.hi = Eigen::VectorXd::Constant(1, hi);
    s.validate();
    return s;
}

MaximalSupport MaximalSupport::box2(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    MaximalSupport s;
    s.lo = lo;
    s.hi = hi;
    s.validate();
    return s;
}

MaximalSupport MaximalSupport::hull(std::vector<Eigen::VectorXd> pts) {
    MaximalSupport s;
    s.points = std::move(pts);
    s.validate();
    return s;
}

int MaximalSupport::dim() const {
    return points.empty() ? static_cast<int>(lo.size())
                          : static_cast<int>(points.front().size());
}

void MaximalSupport::validate() const {
    if (!points.empty()) {
        const auto d = points.front().size();
        for (const auto& p : points) {
            if (p.size() != d || !p.allFinite()) {
                throw std::invalid_argument("MaximalSupport: bad point list");
            }
        }
        return;
    }
    if (lo.size() == 0 || lo.size() != hi.size() || lo.size() > 2) {
        throw std::invalid_argument("MaximalSupport: box must be 1D or 2D");
    }
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
            throw std::invalid_argument("MaximalSupport: need finite lo <= hi");
        }
    }
}

nlohmann::json to_json(const VolatilityInterval& iv) {
    return {{"kind", "interval"},
            {"sigma_lo_sq", iv.sigma_lo_sq},
            {"sigma_hi_sq", iv.sigma_hi_sq}};
}

nlohmann::json to_json(const CovarianceSet& set) {
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : set.vertices()) {
        verts.push_back({{v(0, 0), v(0, 1)}, {v(1, 0), v(1, 1)}});
    }
    return {{"kind", "vertices"}, {"vertices", verts}};
}

nlohmann::json to_json(const SigmaSpec& spec) {
    switch (spec.kind) {
        case SigmaSpec::Kind::Interval:
            return to_json(spec.interval);
        case SigmaSpec::Kind::Conformal: {
            auto j = to_json(spec.interval);
            j["kind"] = "conformal";
            return j;
        }
        case SigmaSpec::Kind::Vertices:
            return to_json(spec.set);
    }
    throw std::logic_error("unreachable");
}

SigmaSpec sigma_spec_from_json(const nlohmann::json& j) {
    SigmaSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "interval" || kind == "conformal") {
        spec.kind = kind == "interval" ? SigmaSpec::Kind::Interval
                                       : SigmaSpec::Kind::Conformal;
        spec.interval.sigma_lo_sq = j.at("sigma_lo_sq").get<double>();
        spec.interval.sigma_hi_sq = j.at("sigma_hi_sq").get<double>();
        spec.interval.validate();
        if (spec.kind == SigmaSpec::Kind::Conformal) {
            spec.set = make_conformal_set(spec.interval);
        }
        return spec;
    }
    if (kind == "vertices") {
        spec.kind = SigmaSpec::Kind::Vertices;
        std::vector<Eigen::Matrix2d> verts;
        for (const auto& m : j.at("vertices")) {
            Eigen::Matrix2d v;
            v << m.at(0).at(0).get<double>(), m.at(0).at(1).get<double>(),
                 m.at(1).at(0).get<double>(), m.at(1).at(1).get<double>();
            verts.push_back(v);
        }
        spec.set = CovarianceSet(std::move(verts));
        return spec;
    }
    throw std::invalid_argument("sigma spec: unknown kind '" + kind + "'");
}

}  // namespace gexp
