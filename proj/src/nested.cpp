#include "gexp/nested.hpp"

#include <cmath>
#include <numeric>

namespace gexp {

namespace {

CellGrid with_nodes(double half_width, int n) {
    CellGrid g;
    g.n = std::max(4, n);
    g.dx = 2.0 * half_width / g.n;
    g.lo = -half_width;
    return g;
}

// Degenerate drivers (σ̄² = 0) are constants: the flow is the identity.
bool is_degenerate(const VolatilityInterval& iv) { return iv.sigma_hi_sq <= 0.0; }

Eigen::ArrayXd resample(const Eigen::ArrayXd& values, const CellGrid& from,
                        const CellGrid& to, BoundaryRule rule) {
    Eigen::ArrayXd out(to.n);
    for (int m = 0; m < to.n; ++m) out[m] = from.interp(values, to.coord(m), rule);
    return out;
}

std::size_t product(const std::vector<CellGrid>& axes) {
    std::size_t p = 1;
    for (const auto& a : axes) p *= static_cast<std::size_t>(a.n);
    return p;
}

}  // namespace

double sequential_expect(const PayoffN& phi,
                         const std::vector<VolatilityInterval>& specs,
                         const ReductionConfig& config,
                         std::vector<StageFunction>* trace) {
    if (specs.empty()) {
        throw std::invalid_argument("sequential_expect: empty spec list");
    }
    const int k = static_cast<int>(specs.size());
    std::vector<CellGrid> anchor(k), solve(k);
    for (int i = 0; i < k; ++i) {
        specs[i].validate();
        const double hw =
            std::max(config.support_mult * std::sqrt(specs[i].sigma_hi_sq), 1e-6);
        anchor[i] = with_nodes(hw, config.anchors);
        solve[i] = CellGrid::centered(hw, config.dx);
    }

    std::vector<double> cur;  // stage function on anchor[0..j-1] after stage j
    for (int j = k - 1; j >= 0; --j) {
        const std::vector<CellGrid> prefix(anchor.begin(), anchor.begin() + j);
        const std::size_t n_rows = product(prefix);
        const CellGrid& s = solve[j];
        const double dt = is_degenerate(specs[j])
                              ? 1.0
                              : config.cfl * s.dx * s.dx / specs[j].sigma_hi_sq;

        std::vector<double> next(n_rows);
        const std::size_t chunk =
            std::max<std::size_t>(1, (1u << 22) / static_cast<std::size_t>(s.n));
        std::vector<double> coords(k);
        for (std::size_t row0 = 0; row0 < n_rows; row0 += chunk) {
            const std::size_t rows_here = std::min(chunk, n_rows - row0);
            Eigen::ArrayXXd h(static_cast<Eigen::Index>(rows_here), s.n);
            for (std::size_t r = 0; r < rows_here; ++r) {
                const std::size_t global = row0 + r;
                if (j == k - 1) {
                    std::size_t rem = global;
                    for (int i = j - 1; i >= 0; --i) {
                        coords[i] = prefix[i].coord(static_cast<int>(rem % prefix[i].n));
                        rem /= prefix[i].n;
                    }
                    for (int m = 0; m < s.n; ++m) {
                        coords[j] = s.coord(m);
                        h(static_cast<Eigen::Index>(r), m) =
                            phi(std::span<const double>(coords.data(), k));
                    }
                } else {
                    const Eigen::ArrayXd slice = Eigen::Map<const Eigen::ArrayXd>(
                        cur.data() + global * anchor[j].n, anchor[j].n);
                    h.row(static_cast<Eigen::Index>(r)) =
                        resample(slice, anchor[j], s, config.boundary).transpose();
                }
            }
            Eigen::ArrayXd vals;
            if (is_degenerate(specs[j])) {
                vals.resize(h.rows());
                Eigen::ArrayXd row(s.n);
                for (Eigen::Index r = 0; r < h.rows(); ++r) {
                    row = h.row(r).transpose();
                    vals[r] = s.interp(row, 0.0, config.boundary);
                }
            } else {
                vals = solve_rows_read(std::move(h), s, specs[j], 1.0, dt, 0.0,
                                       config.boundary);
            }
            for (std::size_t r = 0; r < rows_here; ++r) next[row0 + r] = vals[r];
        }
        cur = std::move(next);
        if (trace) trace->push_back({prefix, cur});
    }
    return cur.at(0);
}

double nested_expect(const PayoffN& phi, const std::vector<double>& times,
                     const VolatilityInterval& iv, const ReductionConfig& config,
                     std::vector<StageFunction>* trace) {
    if (times.empty()) {
        throw std::invalid_argument("nested_expect: empty time list");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > (i == 0 ? 0.0 : times[i - 1]))) {
            throw std::invalid_argument("nested_expect: times must be strictly increasing");
        }
    }
    iv.validate();
    const int k = static_cast<int>(times.size());
    const double sig = std::sqrt(iv.sigma_hi_sq);

    std::vector<CellGrid> anchor(k), solve(k);
    std::vector<double> tau(k);
    for (int i = 0; i < k; ++i) {
        tau[i] = times[i] - (i == 0 ? 0.0 : times[i - 1]);
        const double lam = std::max(config.support_mult * sig * std::sqrt(times[i]), 1e-6);
        anchor[i] = with_nodes(lam, config.anchors);
        const double prev = i == 0 ? 0.0 : anchor[i - 1].half_width();
        const double hw =
            std::max(prev + config.support_mult * sig * std::sqrt(tau[i]), 1e-6);
        solve[i] = CellGrid::centered(hw, config.dx);
    }

    std::vector<double> cur;
    for (int j = k - 1; j >= 0; --j) {
        const std::vector<CellGrid> prefix(anchor.begin(), anchor.begin() + j);
        const std::size_t n_rows = product(prefix);
        const CellGrid& s = solve[j];
        const double dt =
            is_degenerate(iv) ? 1.0 : config.cfl * s.dx * s.dx / iv.sigma_hi_sq;

        std::vector<double> next(n_rows);
        const std::size_t chunk =
            std::max<std::size_t>(1, (1u << 22) / static_cast<std::size_t>(s.n));
        std::vector<double> coords(k);
        for (std::size_t row0 = 0; row0 < n_rows; row0 += chunk) {
            const std::size_t rows_here = std::min(chunk, n_rows - row0);
            Eigen::ArrayXXd h(static_cast<Eigen::Index>(rows_here), s.n);
            std::vector<double> read_at(rows_here, 0.0);
            for (std::size_t r = 0; r < rows_here; ++r) {
                const std::size_t global = row0 + r;
                std::size_t rem = global;
                for (int i = j - 1; i >= 0; --i) {
                    const int idx = static_cast<int>(rem % prefix[i].n);
                    coords[i] = prefix[i].coord(idx);
                    rem /= prefix[i].n;
                }
                if (j > 0) read_at[r] = coords[j - 1];
                if (j == k - 1) {
                    for (int m = 0; m < s.n; ++m) {
                        coords[j] = s.coord(m);
                        h(static_cast<Eigen::Index>(r), m) =
                            phi(std::span<const double>(coords.data(), k));
                    }
                } else {
                    const Eigen::ArrayXd slice = Eigen::Map<const Eigen::ArrayXd>(
                        cur.data() + global * anchor[j].n, anchor[j].n);
                    h.row(static_cast<Eigen::Index>(r)) =
                        resample(slice, anchor[j], s, config.boundary).transpose();
                }
            }
            if (!is_degenerate(iv)) {
                solve_rows_evolve(h, s, iv, tau[j], dt, config.boundary);
            }
            Eigen::ArrayXd row(s.n);
            for (std::size_t r = 0; r < rows_here; ++r) {
                row = h.row(static_cast<Eigen::Index>(r)).transpose();
                next[row0 + r] = s.interp(row, read_at[r], config.boundary);
            }
        }
        cur = std::move(next);
        if (trace) trace->push_back({prefix, cur});
    }
    return cur.at(0);
}

}  // namespace gexp
