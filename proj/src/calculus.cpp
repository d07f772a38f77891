#include "gexp/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace gexp {

namespace {
constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

void require_match(const StepProcess& eta, const PathEnsemble& paths) {
    if (eta.values.rows() != paths.n_steps || eta.values.cols() != paths.n_paths) {
        throw std::invalid_argument("step process grid does not match ensemble");
    }
    if (!eta.adapted) {
        throw std::invalid_argument("integrand must be adapted");
    }
}

const Eigen::ArrayXXd& component(const PathEnsemble& paths, int comp) {
    if (comp == 0) return paths.b1;
    if (comp == 1 && paths.two_d) return paths.b2;
    throw std::invalid_argument("component index out of range for ensemble");
}

Eigen::ArrayXXd increments(const Eigen::ArrayXXd& b) {
    return b.bottomRows(b.rows() - 1) - b.topRows(b.rows() - 1);
}

}  // namespace

StepProcess StepProcess::from_rule(
    const std::function<double(int, std::span<const double>, std::span<const double>)>& rule,
    const PathEnsemble& paths) {
    StepProcess p;
    p.values.resize(paths.n_steps, paths.n_paths);
    for (int j = 0; j < paths.n_paths; ++j) {
        const double* c1 = paths.b1.col(j).data();
        const double* c2 = paths.two_d ? paths.b2.col(j).data() : nullptr;
        for (int k = 0; k < paths.n_steps; ++k) {
            p.values(k, j) = rule(
                k, std::span<const double>(c1, static_cast<std::size_t>(k + 1)),
                c2 ? std::span<const double>(c2, static_cast<std::size_t>(k + 1))
                   : std::span<const double>());
        }
    }
    return p;
}

StepProcess StepProcess::from_values(Eigen::ArrayXXd values, bool adapted) {
    StepProcess p;
    p.values = std::move(values);
    p.adapted = adapted;
    return p;
}

Eigen::ArrayXd ito_integral(const StepProcess& eta, const PathEnsemble& paths,
                            int comp) {
    return ito_integral_range(eta, paths, 0, paths.n_steps, comp);
}

Eigen::ArrayXd ito_integral_range(const StepProcess& eta, const PathEnsemble& paths,
                                  int k0, int k1, int comp) {
    require_match(eta, paths);
    if (k0 < 0 || k1 > paths.n_steps || k0 > k1) {
        throw std::invalid_argument("ito_integral_range: bad step range");
    }
    const auto& b = component(paths, comp);
    const int m = k1 - k0;
    if (m == 0) return Eigen::ArrayXd::Zero(paths.n_paths);
    return ((b.middleRows(k0 + 1, m) - b.middleRows(k0, m)) *
            eta.values.middleRows(k0, m))
        .colwise()
        .sum()
        .transpose();
}

ComplexPerPath ito_integral_complex(const ComplexStepProcess& eta,
                                    const PathEnsemble& paths) {
    if (!paths.two_d) {
        throw std::invalid_argument("complex integral needs a 2D ensemble");
    }
    ComplexPerPath out;
    out.re = ito_integral(eta.re, paths, 0) - ito_integral(eta.im, paths, 1);
    out.im = ito_integral(eta.re, paths, 1) + ito_integral(eta.im, paths, 0);
    return out;
}

Eigen::ArrayXd quadratic_variation(const PathEnsemble& paths, int comp) {
    return increments(component(paths, comp)).square().colwise().sum().transpose();
}

Eigen::ArrayXd mutual_variation(const PathEnsemble& paths, int comp_a, int comp_b) {
    return (increments(component(paths, comp_a)) * increments(component(paths, comp_b)))
        .colwise()
        .sum()
        .transpose();
}

Eigen::ArrayXd mutual_variation_polarized(const PathEnsemble& paths, int comp_a,
                                          int comp_b) {
    const Eigen::ArrayXXd da = increments(component(paths, comp_a));
    const Eigen::ArrayXXd db = increments(component(paths, comp_b));
    const Eigen::ArrayXd qv_sum = (da + db).square().colwise().sum().transpose();
    const Eigen::ArrayXd qv_diff = (da - db).square().colwise().sum().transpose();
    return 0.25 * (qv_sum - qv_diff);
}

ComplexPerPath quadratic_variation_complex(const PathEnsemble& paths) {
    if (!paths.two_d) {
        ComplexPerPath out;
        out.re = quadratic_variation(paths, 0);
        out.im = Eigen::ArrayXd::Zero(paths.n_paths);
        return out;
    }
    const Eigen::ArrayXXd d1 = increments(paths.b1);
    const Eigen::ArrayXXd d2 = increments(paths.b2);
    ComplexPerPath out;
    out.re = (d1.square() - d2.square()).colwise().sum().transpose();
    out.im = 2.0 * (d1 * d2).colwise().sum().transpose();
    return out;
}

ComplexPerPath qv_integral_complex(const ComplexStepProcess& eta,
                                   const PathEnsemble& paths) {
    require_match(eta.re, paths);
    require_match(eta.im, paths);
    if (!paths.two_d) {
        throw std::invalid_argument("qv_integral_complex needs a 2D ensemble");
    }
    const Eigen::ArrayXXd d1 = increments(paths.b1);
    const Eigen::ArrayXXd d2 = increments(paths.b2);
    const Eigen::ArrayXXd qv_re = d1.square() - d2.square();
    const Eigen::ArrayXXd qv_im = 2.0 * d1 * d2;
    ComplexPerPath out;
    out.re = (eta.re.values * qv_re - eta.im.values * qv_im).colwise().sum().transpose();
    out.im = (eta.re.values * qv_im + eta.im.values * qv_re).colwise().sum().transpose();
    return out;
}

MeanCI mean_ci(const Eigen::ArrayXd& samples) {
    MeanCI ci;
    ci.n = samples.size();
    if (ci.n == 0) return ci;
    ci.mean = samples.mean();
    if (ci.n > 1) {
        const double var = (samples - ci.mean).square().sum() / (ci.n - 1);
        ci.half_width = kZ99 * std::sqrt(var / ci.n);
    }
    return ci;
}

namespace {

PathEnsemble sample_block(const Control& control, const SigmaSpec& sigma, double dt,
                          int n_steps, int n_paths, std::uint64_t seed, int first) {
    if (sigma.is_interval()) {
        return sample_paths_1d(control, sigma.interval, dt, n_steps, n_paths, seed,
                               first);
    }
    return sample_paths_2d(control, sigma.set, dt, n_steps, n_paths, seed, first);
}

}  // namespace

ScenarioResult scenario_sup_expect(const PathFunctional& f,
                                   const std::vector<Control>& controls,
                                   const SigmaSpec& sigma, double dt, int n_steps,
                                   int n_paths, std::uint64_t seed, int block_paths) {
    if (controls.empty()) {
        throw std::invalid_argument("scenario_sup_expect: need at least one control");
    }
    ScenarioResult result;
    bool first_control = true;
    const Eigen::ArrayXd empty;
    for (const auto& control : controls) {
        double sum = 0.0, sum_sq = 0.0;
        long n = 0;
        for (int start = 0; start < n_paths; start += block_paths) {
            const int count = std::min(block_paths, n_paths - start);
            const PathEnsemble block =
                sample_block(control, sigma, dt, n_steps, count, seed, start);
            for (int p = 0; p < count; ++p) {
                const double v =
                    block.two_d ? f(dt, block.b1.col(p), block.b2.col(p))
                                : f(dt, block.b1.col(p), empty);
                sum += v;
                sum_sq += v * v;
                ++n;
            }
        }
        MeanCI ci;
        ci.n = n;
        ci.mean = sum / n;
        if (n > 1) {
            const double var = std::max(0.0, (sum_sq - n * ci.mean * ci.mean) / (n - 1));
            ci.half_width = kZ99 * std::sqrt(var / n);
        }
        result.per_control.emplace_back(control.name, ci);
        if (first_control || ci.mean > result.value) {
            result.value = ci.mean;
            result.half_width = ci.half_width;
            result.winning_control = control.name;
            first_control = false;
        }
    }
    return result;
}

ScenarioResult scenario_sup_terminal(const Payoff& phi,
                                     const std::vector<Control>& controls,
                                     const SigmaSpec& sigma, double dt, int n_steps,
                                     int n_paths, std::uint64_t seed) {
    PathFunctional f;
    if (phi.dim() == 1) {
        f = [&phi](double, Eigen::Ref<const Eigen::ArrayXd> b1,
                   Eigen::Ref<const Eigen::ArrayXd>) {
            return phi(b1[b1.size() - 1]);
        };
    } else {
        f = [&phi](double, Eigen::Ref<const Eigen::ArrayXd> b1,
                   Eigen::Ref<const Eigen::ArrayXd> b2) {
            return phi(b1[b1.size() - 1], b2[b2.size() - 1]);
        };
    }
    return scenario_sup_expect(f, controls, sigma, dt, n_steps, n_paths, seed);
}

std::vector<std::string> eta_catalog() {
    return {"one", "two", "sign", "clamp", "osc"};
}

namespace {

double eta_rule(const std::string& key, int k, double b_cur) {
    if (key == "one") return 1.0;
    if (key == "two") return 2.0;
    if (key == "sign") return b_cur >= 0.0 ? 1.0 : -1.0;
    if (key == "clamp") return std::clamp(b_cur, -2.0, 2.0);
    if (key == "osc") return k % 2 == 0 ? 1.0 : -1.0;
    throw std::invalid_argument("unknown eta key '" + key + "'");
}

}  // namespace

StepProcess make_eta(const std::string& key, const PathEnsemble& paths, int comp) {
    return StepProcess::from_rule(
        [&key, comp](int k, std::span<const double> b1, std::span<const double> b2) {
            const auto& b = comp == 0 ? b1 : b2;
            return eta_rule(key, k, b.empty() ? 0.0 : b.back());
        },
        paths);
}

ComplexStepProcess make_eta_complex(const std::string& key, const PathEnsemble& paths) {
    ComplexStepProcess eta;
    eta.re = make_eta(key, paths, 0);
    if (key == "one" || key == "two") {
        eta.im = StepProcess::constant(0.0, paths.n_steps, paths.n_paths);
    } else {
        // imaginary leg keyed to the second component keeps the process complex
        eta.im = make_eta(key, paths, 1);
    }
    return eta;
}

namespace {

struct SupEstimate {
    double value{0.0};
    double half_width{0.0};
};

// max over controls of the blockwise mean of `g` evaluated on fresh ensembles
SupEstimate sup_over_controls(const SigmaSpec& sigma,
                              const std::vector<Control>& controls,
                              const std::string& eta_key, double dt, int n_steps,
                              int n_paths, std::uint64_t seed,
                              const std::function<Eigen::ArrayXd(
                                  const PathEnsemble&, const std::string&)>& g) {
    SupEstimate best;
    bool first = true;
    const int block = 8192;
    for (const auto& control : controls) {
        double sum = 0.0, sum_sq = 0.0;
        long n = 0;
        for (int start = 0; start < n_paths; start += block) {
            const int count = std::min(block, n_paths - start);
            const PathEnsemble e =
                sample_block(control, sigma, dt, n_steps, count, seed, start);
            const Eigen::ArrayXd vals = g(e, eta_key);
            sum += vals.sum();
            sum_sq += vals.square().sum();
            n += vals.size();
        }
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
        const double hw = kZ99 * std::sqrt(var / n);
        if (first || mean > best.value) {
            best.value = mean;
            best.half_width = hw;
            first = false;
        }
    }
    return best;
}

AuditRow make_row(std::string law, double lhs, double rhs, double half_width) {
    AuditRow row;
    row.inequality = std::move(law);
    row.lhs = lhs;
    row.rhs = rhs;
    row.margin = lhs - rhs;
    row.half_width = half_width;
    row.pass = row.margin <= half_width;
    return row;
}

}  // namespace

std::vector<AuditRow> bound_audit_1d(const std::string& eta_key,
                                     const VolatilityInterval& iv, double dt,
                                     int n_steps, int n_paths, std::uint64_t seed) {
    SigmaSpec sigma;
    sigma.kind = SigmaSpec::Kind::Interval;
    sigma.interval = iv;
    const auto controls = control_family_full(vertex_count_1d(iv), false);
    const double horizon = dt * n_steps;

    auto integral = [](const PathEnsemble& e, const std::string& key) {
        return ito_integral(make_eta(key, e), e).eval();
    };
    auto integral_sq = [&](const PathEnsemble& e, const std::string& key) {
        return ito_integral(make_eta(key, e), e).square().eval();
    };
    auto eta_l2 = [dt](const PathEnsemble& e, const std::string& key) {
        return (make_eta(key, e).values.square().colwise().sum() * dt)
            .transpose()
            .eval();
    };
    auto isometry_rhs = [](const PathEnsemble& e, const std::string& key) {
        const StepProcess eta = make_eta(key, e);
        const Eigen::ArrayXXd dqv =
            (e.b1.bottomRows(e.n_steps) - e.b1.topRows(e.n_steps)).square();
        return (eta.values.square() * dqv).colwise().sum().transpose().eval();
    };

    std::vector<AuditRow> rows;

    // E[∫η dB] = 0: both signs bounded by noise.
    const auto mean_pos =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, integral);
    rows.push_back(make_row("E[int eta dB] = 0 (eta=" + eta_key + ")",
                            std::abs(mean_pos.value), 0.0, 2.0 * mean_pos.half_width));

    const auto lhs =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, integral_sq);
    const auto l2 =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, eta_l2);
    rows.push_back(make_row(
        "E[(int eta dB)^2] <= sigma_hi_sq*E[int eta^2 dt] (eta=" + eta_key + ")",
        lhs.value, iv.sigma_hi_sq * l2.value,
        lhs.half_width + iv.sigma_hi_sq * l2.half_width));

    const auto iso =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, isometry_rhs);
    rows.push_back(make_row(
        "E[(int eta dB)^2] = E[int eta^2 d<B>] (eta=" + eta_key + ")",
        std::abs(lhs.value - iso.value), 0.0,
        lhs.half_width + iso.half_width + 4.0 * iv.sigma_hi_sq * horizon * dt));

    return rows;
}

std::vector<AuditRow> bound_audit_complex(const std::string& eta_key,
                                          const CovarianceSet& sigma_set, double dt,
                                          int n_steps, int n_paths,
                                          std::uint64_t seed) {
    SigmaSpec sigma;
    sigma.kind = SigmaSpec::Kind::Vertices;
    sigma.set = sigma_set;
    const auto controls =
        control_family_full(static_cast<int>(sigma_set.size()), true);
    const double horizon = dt * n_steps;

    auto mod_sq = [](const PathEnsemble& e, const std::string& key) {
        const ComplexPerPath v = ito_integral_complex(make_eta_complex(key, e), e);
        return (v.re.square() + v.im.square()).eval();
    };
    auto eta_l2 = [dt](const PathEnsemble& e, const std::string& key) {
        const ComplexStepProcess eta = make_eta_complex(key, e);
        return ((eta.re.values.square() + eta.im.values.square()).colwise().sum() * dt)
            .transpose()
            .eval();
    };
    auto j_abs = [](const PathEnsemble& e, const std::string& key) {
        const ComplexPerPath v = qv_integral_complex(make_eta_complex(key, e), e);
        return (v.re.square() + v.im.square()).sqrt().eval();
    };
    auto eta_l1 = [dt](const PathEnsemble& e, const std::string& key) {
        const ComplexStepProcess eta = make_eta_complex(key, e);
        return ((eta.re.values.square() + eta.im.values.square()).sqrt().colwise().sum() *
                dt)
            .transpose()
            .eval();
    };
    // complex isometry, componentwise: E_C[(∫η dB)²] = E_C[∫η² d⟨B⟩]
    auto sq_re = [](const PathEnsemble& e, const std::string& key) {
        const ComplexPerPath v = ito_integral_complex(make_eta_complex(key, e), e);
        return (v.re.square() - v.im.square()).eval();
    };
    auto sq_im = [](const PathEnsemble& e, const std::string& key) {
        const ComplexPerPath v = ito_integral_complex(make_eta_complex(key, e), e);
        return (2.0 * v.re * v.im).eval();
    };
    auto qv_re = [](const PathEnsemble& e, const std::string& key) {
        const ComplexStepProcess eta = make_eta_complex(key, e);
        ComplexStepProcess eta_sq;
        eta_sq.re = StepProcess::from_values(
            eta.re.values.square() - eta.im.values.square(), true);
        eta_sq.im = StepProcess::from_values(2.0 * eta.re.values * eta.im.values, true);
        return qv_integral_complex(eta_sq, e).re.eval();
    };
    auto qv_im = [](const PathEnsemble& e, const std::string& key) {
        const ComplexStepProcess eta = make_eta_complex(key, e);
        ComplexStepProcess eta_sq;
        eta_sq.re = StepProcess::from_values(
            eta.re.values.square() - eta.im.values.square(), true);
        eta_sq.im = StepProcess::from_values(2.0 * eta.re.values * eta.im.values, true);
        return qv_integral_complex(eta_sq, e).im.eval();
    };

    const double k_const = sigma_set.max_var_x() + sigma_set.max_var_y();
    const double j_const = 4.0 * (sigma_set.max_abs_var_x() + sigma_set.max_abs_var_y() +
                                  2.0 * sigma_set.max_abs_cov());

    std::vector<AuditRow> rows;
    const auto lhs =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, mod_sq);
    const auto l2 =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, eta_l2);
    auto row16 = make_row(
        "E[|int eta dB|^2] <= 16K*E[int |eta|^2 dt], K=sup var1+sup var2 (eta=" +
            eta_key + ")",
        lhs.value, 16.0 * k_const * l2.value,
        lhs.half_width + 16.0 * k_const * l2.half_width);
    rows.push_back(row16);
    // tightest constant actually observed, for the record
    AuditRow tight;
    tight.inequality = "observed ratio E[|int eta dB|^2]/E[int |eta|^2 dt] vs 16K (eta=" +
                       eta_key + ")";
    tight.lhs = l2.value > 0 ? lhs.value / l2.value : 0.0;
    tight.rhs = 16.0 * k_const;
    tight.margin = tight.lhs - tight.rhs;
    tight.half_width = 0.0;
    tight.pass = true;  // informational
    rows.push_back(tight);

    const auto j_lhs =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, j_abs);
    const auto l1 =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, eta_l1);
    rows.push_back(make_row(
        "E[|int eta d<B>|] <= 4(s1+s3+2s2)*E[int |eta| dt] (eta=" + eta_key + ")",
        j_lhs.value, j_const * l1.value, j_lhs.half_width + j_const * l1.half_width));

    const auto a_re =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, sq_re);
    const auto b_re =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, qv_re);
    const auto a_im =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, sq_im);
    const auto b_im =
        sup_over_controls(sigma, controls, eta_key, dt, n_steps, n_paths, seed, qv_im);
    const double disc = 8.0 * k_const * horizon * dt;  // discretization allowance
    rows.push_back(make_row(
        "Re E_C[(int eta dB)^2] = Re E_C[int eta^2 d<B>] (eta=" + eta_key + ")",
        std::abs(a_re.value - b_re.value), 0.0,
        a_re.half_width + b_re.half_width + disc));
    rows.push_back(make_row(
        "Im E_C[(int eta dB)^2] = Im E_C[int eta^2 d<B>] (eta=" + eta_key + ")",
        std::abs(a_im.value - b_im.value), 0.0,
        a_im.half_width + b_im.half_width + disc));
    return rows;
}

Eigen::ArrayXd ito_formula_residual_real(const ScalarC2& Phi, const ItoSpec1& X,
                                         const PathEnsemble& paths) {
    if (!Phi.f || !Phi.d1 || !Phi.d2) {
        throw std::invalid_argument("ito_formula_residual_real: need f, f', f''");
    }
    require_match(X.alpha, paths);
    require_match(X.eta, paths);
    require_match(X.beta, paths);

    const int n = paths.n_steps;
    Eigen::ArrayXd res(paths.n_paths);
    for (int p = 0; p < paths.n_paths; ++p) {
        double x = X.x0;
        double rhs = 0.0;
        for (int k = 0; k < n; ++k) {
            const double db = paths.b1(k + 1, p) - paths.b1(k, p);
            const double dqv = db * db;
            const double a = X.alpha.values(k, p);
            const double e = X.eta.values(k, p);
            const double b = X.beta.values(k, p);
            const double d1 = Phi.d1(x);
            rhs += d1 * b * db + d1 * a * paths.dt +
                   (d1 * e + 0.5 * Phi.d2(x) * b * b) * dqv;
            x += a * paths.dt + e * dqv + b * db;
        }
        res[p] = Phi.f(x) - Phi.f(X.x0) - rhs;
    }
    return res;
}

double l2_norm(const Eigen::ArrayXd& per_path) {
    if (per_path.size() == 0) return 0.0;
    return std::sqrt(per_path.square().mean());
}

}  // namespace gexp
