#ifndef AIRA_FIT_HPP
#define AIRA_FIT_HPP

/** @file
 * Least-squares VAR(p) estimation and forward simulation.
 */

#include <Eigen/QR>

#include <string>

#include "aira/model.hpp"

namespace aira {

namespace detail {

// Regressor layout per row: [1, Y_{t-1}', ..., Y_{t-p}', X_t'].
inline Eigen::MatrixXd var_design(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x, Eigen::Index p) {
    const auto t = y.rows();
    const auto m = y.cols();
    const auto l = x.cols();
    Eigen::MatrixXd design(t - p, 1 + m * p + l);
    for (Eigen::Index r = 0; r < t - p; ++r) {
        const auto now = r + p;
        design(r, 0) = 1.0;
        for (Eigen::Index lag = 1; lag <= p; ++lag)
            design.block(r, 1 + (lag - 1) * m, 1, m) = y.row(now - lag);
        if (l > 0) design.block(r, 1 + m * p, 1, l) = x.row(now);
    }
    return design;
}

} // namespace detail

/// Per-equation OLS fit with intercept. Means/sds are copied from @p data.
inline VarModel fit_var(const EmaDataset& data, int lags) {
    if (lags < 1) throw FitError("lag order must be >= 1");
    data.validate();
    const auto p = static_cast<Eigen::Index>(lags);
    const auto m = static_cast<Eigen::Index>(data.dimension());
    const auto l = static_cast<Eigen::Index>(data.exo_names.size());
    const auto t = data.rows.rows();
    if (m == 0) throw FitError("dataset has no endogenous variables");
    for (const auto& v : data.variables)
        if (!(v.sd > 0.0)) throw FitError("column '" + v.name + "' has zero variance");
    if (t - p < m * p + 1 + l)
        throw FitError("too few observations (" + std::to_string(t) + ") for " + std::to_string(lags) +
                       " lags and " + std::to_string(m) + " variables");

    const Eigen::MatrixXd design = detail::var_design(data.rows, data.exogenous, p);
    const Eigen::MatrixXd target = data.rows.bottomRows(t - p);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) throw FitError("regressor matrix is singular");
    const Eigen::MatrixXd beta = qr.solve(target); // (1 + mp + l) x m

    VarModel model;
    model.variables = data.variables;
    model.interval_minutes = data.interval_minutes;
    model.constant = beta.row(0).transpose();
    for (Eigen::Index lag = 0; lag < p; ++lag)
        model.coefficient_blocks.push_back(beta.block(1 + lag * m, 0, m, m).transpose());
    model.exo_names = data.exo_names;
    if (l > 0) model.exo_coefficients = beta.bottomRows(l).transpose();
    Eigen::MatrixXd residuals = target - design * beta;
    model.residual_covariance = sample_covariance(residuals);
    model.residuals = std::move(residuals);
    return model;
}

/// Runs the VAR recursion forward. @p initial holds the first p rows
/// (oldest first) and is copied to the output; @p innovations (rows
/// correspond to output rows p..) and @p exogenous (aligned with output
/// rows) may be empty.
inline Eigen::MatrixXd simulate_var(const VarModel& model, const Eigen::MatrixXd& initial,
                                    Eigen::Index steps, const Eigen::MatrixXd& innovations = {},
                                    const Eigen::MatrixXd& exogenous = {}) {
    const auto m = static_cast<Eigen::Index>(model.dimension());
    const auto p = static_cast<Eigen::Index>(model.lags());
    if (initial.rows() != p || initial.cols() != m) throw DomainError("initial block must be p x m");
    const bool use_exo = exogenous.size() > 0 && model.exo_count() > 0;
    Eigen::MatrixXd out(p + steps, m);
    out.topRows(p) = initial;
    for (Eigen::Index t = p; t < p + steps; ++t) {
        Eigen::VectorXd next = model.constant;
        for (Eigen::Index lag = 1; lag <= p; ++lag)
            next.noalias() += model.coefficient_blocks[static_cast<std::size_t>(lag - 1)] *
                              out.row(t - lag).transpose();
        if (use_exo) next.noalias() += model.exo_coefficients * exogenous.row(t).transpose();
        if (innovations.size() > 0) next += innovations.row(t - p).transpose();
        out.row(t) = next.transpose();
    }
    return out;
}

/// Wraps simulated rows as a dataset carrying @p model's metadata.
inline EmaDataset dataset_from_rows(const VarModel& model, Eigen::MatrixXd rows,
                                    Eigen::MatrixXd exogenous = {}) {
    EmaDataset data;
    data.variables = model.variables;
    data.interval_minutes = model.interval_minutes;
    data.rows = std::move(rows);
    if (exogenous.size() > 0) {
        data.exo_names = model.exo_names;
        data.exogenous = std::move(exogenous);
    } else {
        data.exogenous.resize(data.rows.rows(), 0);
    }
    data.refresh_moments();
    return data;
}

} // namespace aira

#endif // AIRA_FIT_HPP
