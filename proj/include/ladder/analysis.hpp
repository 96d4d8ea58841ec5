#pragma once

// Scaling fits and conformal-invariant diagnostics over ensemble tables.
//
// Entropy curves are fitted to  gamma*L + (c/3)*ln L + beta  and negativity
// curves to  gamma*L + (c/2)*ln L + beta, by weighted least squares on the
// regressors (L, ln L, 1) with an exact normal-equation solve. Weights come
// from confidence-interval widths (1/width^2) and reduce to uniform when all
// widths agree. The four-parameter curve a*(e^{b*eta^c}-1)^d used for the
// mutual-information cross-ratio dependence is fitted with a damped
// Gauss-Newton iteration from a grid of starts; only the combination
// Delta = c*d is identified at small eta, where I ~ a*b^d * eta^(c*d).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ladder/common.hpp"

namespace ladder {

struct fit_error : std::runtime_error {
    explicit fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class FitModel { entropy_ansatz, negativity_ansatz, linear_only, log_only };

inline std::string fit_model_name(FitModel m) {
    switch (m) {
        case FitModel::entropy_ansatz: return "entropy_ansatz";
        case FitModel::negativity_ansatz: return "negativity_ansatz";
        case FitModel::linear_only: return "linear_only";
        case FitModel::log_only: return "log_only";
    }
    return "?";
}

// ln-coefficient normalization: S ansatz carries c/3, E ansatz c/2.
inline double log_coefficient_divisor(FitModel m) {
    switch (m) {
        case FitModel::entropy_ansatz: return 3.0;
        case FitModel::negativity_ansatz: return 2.0;
        default: return 1.0;
    }
}

struct ScalingPoint {
    double size = 0.0;    // system size L
    double value = 0.0;   // ensemble mean
    double weight = 1.0;  // fit weight, typically 1/ci_width^2
};

struct FitResult {
    double gamma = 0.0;
    double c = 0.0;
    double beta = 0.0;
    int l_min = 0;
    int l_max = 0;
    double rss = 0.0;  // weighted residual sum of squares
    FitModel model = FitModel::entropy_ansatz;

    double predict(double L) const {
        return gamma * L + c / log_coefficient_divisor(model) * std::log(L) + beta;
    }
};

inline std::vector<ScalingPoint> make_points(const std::vector<double>& sizes,
                                             const std::vector<double>& values,
                                             const std::vector<double>& ci_widths = {}) {
    if (sizes.size() != values.size()) throw parameter_error("make_points: size mismatch");
    std::vector<ScalingPoint> pts(sizes.size());
    bool weighted = ci_widths.size() == sizes.size();
    if (weighted)
        for (double w : ci_widths)
            if (!(w > 0.0)) weighted = false;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        pts[i].size = sizes[i];
        pts[i].value = values[i];
        pts[i].weight = weighted ? 1.0 / (ci_widths[i] * ci_widths[i]) : 1.0;
    }
    return pts;
}

namespace detail {

inline FitResult weighted_linear_fit(const std::vector<ScalingPoint>& points, int l_min,
                                     int l_max, FitModel model) {
    if (l_min >= l_max) throw parameter_error("fit: l_min must be below l_max");
    std::vector<const ScalingPoint*> sel;
    for (const auto& p : points)
        if (p.size >= l_min && p.size <= l_max) sel.push_back(&p);
    const bool with_linear = model != FitModel::log_only;
    const bool with_log = model != FitModel::linear_only;
    const int n_params = 1 + (with_linear ? 1 : 0) + (with_log ? 1 : 0);
    if (static_cast<int>(sel.size()) < n_params)
        throw parameter_error("fit: not enough points in range");

    MatrixXd x(sel.size(), n_params);
    VectorXd y(sel.size());
    VectorXd w(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) {
        int col = 0;
        if (with_linear) x(static_cast<Eigen::Index>(i), col++) = sel[i]->size;
        if (with_log) x(static_cast<Eigen::Index>(i), col++) = std::log(sel[i]->size);
        x(static_cast<Eigen::Index>(i), col) = 1.0;
        y(static_cast<Eigen::Index>(i)) = sel[i]->value;
        w(static_cast<Eigen::Index>(i)) = sel[i]->weight;
    }
    const MatrixXd xtw = x.transpose() * w.asDiagonal();
    const MatrixXd normal = xtw * x;
    Eigen::FullPivLU<MatrixXd> lu(normal);
    lu.setThreshold(1e-10);
    if (lu.rank() < n_params) throw fit_error("fit: rank-deficient design matrix");
    const VectorXd coef = lu.solve(xtw * y);

    FitResult fit;
    fit.model = model;
    fit.l_min = l_min;
    fit.l_max = l_max;
    int col = 0;
    if (with_linear) fit.gamma = coef(col++);
    if (with_log) fit.c = coef(col++) * log_coefficient_divisor(model);
    fit.beta = coef(col);
    for (std::size_t i = 0; i < sel.size(); ++i) {
        const double r = sel[i]->value - fit.predict(sel[i]->size);
        fit.rss += sel[i]->weight * r * r;
    }
    return fit;
}

}  // namespace detail

inline FitResult fit_entropy_scaling(const std::vector<ScalingPoint>& points, int l_min,
                                     int l_max) {
    return detail::weighted_linear_fit(points, l_min, l_max, FitModel::entropy_ansatz);
}

inline FitResult fit_negativity_scaling(const std::vector<ScalingPoint>& points, int l_min,
                                        int l_max) {
    return detail::weighted_linear_fit(points, l_min, l_max, FitModel::negativity_ansatz);
}

// (gamma*L_max, (c/k)*ln L_max): the two contributions at the range endpoint.
inline std::pair<double, double> compare_contributions(const FitResult& fit) {
    return {fit.gamma * fit.l_max,
            fit.c / log_coefficient_divisor(fit.model) * std::log(fit.l_max)};
}

struct ResidualComparison {
    FitResult linear;
    FitResult logarithmic;
    double signed_total_linear = 0.0;  // sum of (data - fit), sign kept
    double signed_total_log = 0.0;
    std::vector<double> residuals_linear;
    std::vector<double> residuals_log;
    FitModel preferred = FitModel::linear_only;  // smaller weighted rss wins
};

inline ResidualComparison residual_comparison(const std::vector<ScalingPoint>& points,
                                              int l_min, int l_max) {
    ResidualComparison cmp;
    cmp.linear = detail::weighted_linear_fit(points, l_min, l_max, FitModel::linear_only);
    cmp.logarithmic = detail::weighted_linear_fit(points, l_min, l_max, FitModel::log_only);
    for (const auto& pt : points) {
        if (pt.size < l_min || pt.size > l_max) continue;
        const double rl = pt.value - cmp.linear.predict(pt.size);
        const double rg = pt.value - cmp.logarithmic.predict(pt.size);
        cmp.residuals_linear.push_back(rl);
        cmp.residuals_log.push_back(rg);
        cmp.signed_total_linear += rl;
        cmp.signed_total_log += rg;
    }
    cmp.preferred = cmp.linear.rss <= cmp.logarithmic.rss ? FitModel::linear_only
                                                          : FitModel::log_only;
    return cmp;
}

// --- cross ratio -------------------------------------------------------------

// eta = x12*x34 / (x13*x24) with chord lengths x_ij = L/pi * sin(pi*|xi-xj|/L).
inline double cross_ratio(int L, double x1, double x2, double x3, double x4) {
    const double xs[4] = {x1, x2, x3, x4};
    for (int i = 0; i < 4; ++i) {
        if (xs[i] < 0.0 || xs[i] > L) throw parameter_error("cross_ratio: boundary outside ring");
        for (int j = i + 1; j < 4; ++j) {
            double d = std::fmod(std::abs(xs[i] - xs[j]), static_cast<double>(L));
            if (d < 1e-12 || std::abs(d - L) < 1e-12)
                throw parameter_error("cross_ratio: coincident boundaries");
        }
    }
    auto chord = [L](double a, double b) {
        return L / kPi * std::sin(kPi * std::abs(a - b) / L);
    };
    return chord(x1, x2) * chord(x3, x4) / (chord(x1, x3) * chord(x2, x4));
}

// --- eta power-law fit ---------------------------------------------------------

struct EtaPoint {
    double eta = 0.0;
    double info = 0.0;
};

struct EtaFitResult {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double delta = 0.0;      // c*d, the small-eta exponent
    double prefactor = 0.0;  // a*b^d
    double rss = 0.0;
    int starts_converged = 0;
};

namespace detail {

inline double eta_model(const double* q, double eta) {
    // q holds log-parameters, so a,b,c,d stay positive.
    const double a = std::exp(q[0]), b = std::exp(q[1]), c = std::exp(q[2]), d = std::exp(q[3]);
    return a * std::pow(std::expm1(b * std::pow(eta, c)), d);
}

inline double eta_rss(const double* q, const std::vector<EtaPoint>& pts) {
    double rss = 0.0;
    for (const auto& p : pts) {
        const double r = p.info - eta_model(q, p.eta);
        rss += r * r;
    }
    return rss;
}

// Damped Gauss-Newton with a numeric Jacobian in log-parameter space.
inline bool eta_fit_from_start(const std::vector<EtaPoint>& pts, double* q, double& rss) {
    const int n = static_cast<int>(pts.size());
    double lambda = 1e-3;
    rss = eta_rss(q, pts);
    for (int iter = 0; iter < 300; ++iter) {
        MatrixXd jac(n, 4);
        VectorXd res(n);
        for (int i = 0; i < n; ++i) {
            res(i) = pts[static_cast<std::size_t>(i)].info -
                     eta_model(q, pts[static_cast<std::size_t>(i)].eta);
            for (int k = 0; k < 4; ++k) {
                double qp[4] = {q[0], q[1], q[2], q[3]};
                const double h = 1e-6;
                qp[k] += h;
                jac(i, k) = (eta_model(qp, pts[static_cast<std::size_t>(i)].eta) -
                             eta_model(q, pts[static_cast<std::size_t>(i)].eta)) / h;
            }
        }
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd jtr = jac.transpose() * res;
        bool improved = false;
        for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
            MatrixXd damped = jtj;
            for (int k = 0; k < 4; ++k) damped(k, k) += lambda * (jtj(k, k) + 1e-12);
            const VectorXd step = damped.ldlt().solve(jtr);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            double qn[4] = {q[0] + step(0), q[1] + step(1), q[2] + step(2), q[3] + step(3)};
            // Keep parameters in a sane window to avoid overflow of expm1/pow.
            bool sane = true;
            for (double v : qn)
                if (!(v > -20.0 && v < 8.0)) sane = false;
            const double rss_new = sane ? eta_rss(qn, pts) : 2.0 * rss + 1.0;
            if (rss_new < rss) {
                const double drop = rss - rss_new;
                std::copy(qn, qn + 4, q);
                rss = rss_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (drop < 1e-14 * (1.0 + rss)) return true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) return iter > 0;
    }
    return true;
}

}  // namespace detail

// Multi-start fit of I(eta) = a*(e^{b*eta^c}-1)^d. Starts cover a log grid in
// (a,b) crossed with (c,d) in {0.5,1,2}^2; the (c,d) pair alone is degenerate,
// so only Delta = c*d should be consumed downstream.
inline EtaFitResult fit_eta_powerlaw(const std::vector<EtaPoint>& points) {
    if (points.size() < 6) throw parameter_error("fit_eta_powerlaw: need at least 6 points");
    double eta_min = points[0].eta, eta_max = points[0].eta;
    for (const auto& p : points) {
        if (p.eta <= 0.0) throw parameter_error("fit_eta_powerlaw: eta must be positive");
        eta_min = std::min(eta_min, p.eta);
        eta_max = std::max(eta_max, p.eta);
    }
    if (eta_max / eta_min < 10.0)
        throw parameter_error("fit_eta_powerlaw: points must span a decade in eta");

    const double ab_grid[4] = {0.05, 0.3, 1.5, 8.0};
    const double cd_grid[3] = {0.5, 1.0, 2.0};
    EtaFitResult best;
    double best_rss = std::numeric_limits<double>::infinity();
    int converged = 0;
    for (double a0 : ab_grid)
        for (double b0 : ab_grid)
            for (double c0 : cd_grid)
                for (double d0 : cd_grid) {
                    double q[4] = {std::log(a0), std::log(b0), std::log(c0), std::log(d0)};
                    double rss = 0.0;
                    if (!detail::eta_fit_from_start(points, q, rss)) continue;
                    ++converged;
                    if (rss < best_rss) {
                        best_rss = rss;
                        best.a = std::exp(q[0]);
                        best.b = std::exp(q[1]);
                        best.c = std::exp(q[2]);
                        best.d = std::exp(q[3]);
                        best.rss = rss;
                    }
                }
    if (converged == 0)
        throw fit_error("fit_eta_powerlaw: no start converged (n=" +
                        std::to_string(points.size()) + ")");
    best.starts_converged = converged;
    best.delta = best.c * best.d;
    best.prefactor = best.a * std::pow(best.b, best.d);
    return best;
}

// Log-log slope on the small-eta tail; independent route to Delta.
inline double loglog_delta_estimate(const std::vector<EtaPoint>& points, double eta_cut = 0.1) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& p : points) {
        if (p.eta > eta_cut || p.info <= 0.0) continue;
        const double x = std::log(p.eta);
        const double y = std::log(p.info);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw parameter_error("loglog_delta_estimate: too few tail points");
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw fit_error("loglog_delta_estimate: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace ladder
