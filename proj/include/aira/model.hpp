#ifndef AIRA_MODEL_HPP
#define AIRA_MODEL_HPP

/** @file
 * Core value types: variable metadata, EMA datasets and fitted VAR(p) models.
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "aira/errors.hpp"

namespace aira {

/// How a variable relates to well-being. Negative variables are preferably
/// decreased (e.g. agitation), positive ones increased (e.g. cheerfulness).
enum class Polarity { positive, negative };

inline std::string_view to_string(Polarity p) {
    return p == Polarity::positive ? "positive" : "negative";
}

inline Polarity parse_polarity(std::string_view s) {
    if (s == "positive" || s == "+" || s == "1") return Polarity::positive;
    if (s == "negative" || s == "-" || s == "-1") return Polarity::negative;
    throw ConfigError("unknown polarity '" + std::string(s) + "' (expected positive or negative)");
}

/// +1 for positive variables, -1 for negative ones.
inline double polarity_sign(Polarity p) { return p == Polarity::positive ? 1.0 : -1.0; }

struct VariableMeta {
    std::string name;
    Polarity polarity = Polarity::positive;
    double mean = 0.0; ///< average answer, answer-scale units
    double sd = 0.0;   ///< sample standard deviation, answer-scale units

    bool operator==(const VariableMeta&) const = default;
};

namespace detail {

inline bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

inline void check_variables(const std::vector<VariableMeta>& vars, auto&& raise) {
    std::unordered_set<std::string> seen;
    for (const auto& v : vars) {
        if (v.name.empty()) raise("variable name must not be empty");
        if (!seen.insert(v.name).second) raise("duplicate variable name '" + v.name + "'");
        if (!(v.sd >= 0.0)) raise("standard deviation of '" + v.name + "' must be >= 0");
    }
}

} // namespace detail

/// Sample covariance (divisor n - 1) of the columns of @p x.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
    const auto n = x.rows();
    if (n < 2) return Eigen::MatrixXd::Zero(x.cols(), x.cols());
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

/// Equidistant, complete multivariate diary series. Rows are observations,
/// oldest first.
struct EmaDataset {
    std::vector<VariableMeta> variables;
    Eigen::MatrixXd rows;                ///< T x m
    double interval_minutes = 0.0;
    std::vector<std::string> exo_names;
    Eigen::MatrixXd exogenous;           ///< T x l, zero columns when absent

    std::size_t observations() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t dimension() const { return variables.size(); }

    /// Recomputes every VariableMeta mean/sd from the stored columns.
    void refresh_moments() {
        const auto t = rows.rows();
        for (std::size_t j = 0; j < variables.size(); ++j) {
            const auto col = rows.col(static_cast<Eigen::Index>(j));
            const double mean = t > 0 ? col.mean() : 0.0;
            double ss = 0.0;
            for (Eigen::Index i = 0; i < t; ++i) ss += (col(i) - mean) * (col(i) - mean);
            variables[j].mean = mean;
            variables[j].sd = t > 1 ? std::sqrt(ss / static_cast<double>(t - 1)) : 0.0;
        }
    }

    void validate() const {
        detail::check_variables(variables, [](const std::string& m) -> void { throw ConfigError(m); });
        if (!(interval_minutes > 0.0)) throw ConfigError("interval_minutes must be > 0");
        if (rows.cols() != static_cast<Eigen::Index>(variables.size()))
            throw ConfigError("dataset column count does not match variable list");
        if (exogenous.cols() != static_cast<Eigen::Index>(exo_names.size()))
            throw ConfigError("exogenous column count does not match exogenous names");
        if (exogenous.cols() > 0 && exogenous.rows() != rows.rows())
            throw ConfigError("exogenous rows do not match endogenous rows");
    }
};

/// A fitted VAR(p):
///   Y_t = c + B^1 Y_{t-1} + ... + B^p Y_{t-p} + xi X_t + e_t
/// Row i of every B^l holds the coefficients predicting variable i.
struct VarModel {
    std::vector<VariableMeta> variables;
    std::vector<Eigen::MatrixXd> coefficient_blocks; ///< B^1..B^p, each m x m
    Eigen::VectorXd constant;                        ///< c, length m
    std::vector<std::string> exo_names;
    Eigen::MatrixXd exo_coefficients;                ///< xi, m x l
    std::optional<Eigen::MatrixXd> residuals;        ///< T' x m
    Eigen::MatrixXd residual_covariance;             ///< Sigma, m x m
    double interval_minutes = 0.0;

    std::size_t dimension() const { return variables.size(); }
    std::size_t lags() const { return coefficient_blocks.size(); }
    std::size_t exo_count() const { return exo_names.size(); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < variables.size(); ++i)
            if (variables[i].name == name) return i;
        return std::nullopt;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(variables.size());
        for (const auto& v : variables) out.push_back(v.name);
        return out;
    }

    /// Throws ModelFormatError when shapes or values are inconsistent.
    void validate() const {
        const auto raise = [](const std::string& m) -> void { throw ModelFormatError(m); };
        const auto m = static_cast<Eigen::Index>(dimension());
        if (m == 0) raise("model has no variables");
        detail::check_variables(variables, raise);
        if (coefficient_blocks.empty()) raise("model needs at least one lag");
        for (const auto& b : coefficient_blocks) {
            if (b.rows() != m || b.cols() != m) raise("coefficient block is not m x m");
            if (!b.allFinite()) raise("coefficient block contains non-finite values");
        }
        if (constant.size() != m) raise("constant must have length m");
        if (!constant.allFinite()) raise("constant contains non-finite values");
        const auto l = static_cast<Eigen::Index>(exo_names.size());
        if (l > 0 && (exo_coefficients.rows() != m || exo_coefficients.cols() != l))
            raise("exo_coefficients must be m x l");
        if (l == 0 && exo_coefficients.size() != 0) raise("exo_coefficients given without exo_names");
        if (residual_covariance.rows() != m || residual_covariance.cols() != m)
            raise("residual_covariance must be m x m");
        if (!residual_covariance.allFinite()) raise("residual_covariance contains non-finite values");
        if ((residual_covariance - residual_covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            raise("residual_covariance is not symmetric");
        if (residuals && residuals->cols() != m) raise("residuals must have m columns");
        if (!(interval_minutes > 0.0)) raise("interval_minutes must be > 0");
    }

    bool operator==(const VarModel& o) const {
        if (variables != o.variables || exo_names != o.exo_names) return false;
        if (coefficient_blocks.size() != o.coefficient_blocks.size()) return false;
        for (std::size_t i = 0; i < coefficient_blocks.size(); ++i)
            if (!detail::same_matrix(coefficient_blocks[i], o.coefficient_blocks[i])) return false;
        if (residuals.has_value() != o.residuals.has_value()) return false;
        if (residuals && !detail::same_matrix(*residuals, *o.residuals)) return false;
        return detail::same_matrix(constant, o.constant) &&
               detail::same_matrix(exo_coefficients, o.exo_coefficients) &&
               detail::same_matrix(residual_covariance, o.residual_covariance) &&
               interval_minutes == o.interval_minutes;
    }
};

/// Stacked first-order form of a VAR(p): B^1..B^p across the top block row,
/// identity blocks on the sub-diagonal.
struct CompanionView {
    Eigen::MatrixXd matrix;

    explicit CompanionView(const VarModel& model) {
        const auto m = static_cast<Eigen::Index>(model.dimension());
        const auto p = static_cast<Eigen::Index>(model.lags());
        matrix = Eigen::MatrixXd::Zero(m * p, m * p);
        for (Eigen::Index l = 0; l < p; ++l)
            matrix.block(0, l * m, m, m) = model.coefficient_blocks[static_cast<std::size_t>(l)];
        if (p > 1) matrix.block(m, 0, m * (p - 1), m * (p - 1)).setIdentity();
    }
};

/// Convenience constructor for hand-specified models (tests, degraded mode).
inline VarModel make_model(std::vector<std::string> names, std::vector<Eigen::MatrixXd> blocks,
                           double interval_minutes = 1.0) {
    VarModel model;
    const auto m = static_cast<Eigen::Index>(names.size());
    for (auto& n : names) model.variables.push_back({std::move(n), Polarity::positive, 0.0, 0.0});
    model.coefficient_blocks = std::move(blocks);
    model.constant = Eigen::VectorXd::Zero(m);
    model.residual_covariance = Eigen::MatrixXd::Identity(m, m);
    model.interval_minutes = interval_minutes;
    return model;
}

} // namespace aira

#endif // AIRA_MODEL_HPP
