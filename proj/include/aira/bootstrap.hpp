#ifndef AIRA_BOOTSTRAP_HPP
#define AIRA_BOOTSTRAP_HPP

/** @file
 * Residual bootstrap of impulse responses.
 *
 * Each replicate resamples the centered fit residuals with replacement,
 * regenerates a series from the fitted model, refits with the same lag order
 * and recomputes every response. Replicate r draws from an engine seeded by
 * (seed, r), so bands do not depend on the worker count.
 */

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>

#include "aira/fit.hpp"
#include "aira/irf.hpp"

namespace aira {

struct BootstrapConfig {
    int iterations = 200;
    double confidence = 0.95;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    void validate() const {
        if (iterations < 1) throw ConfigError("bootstrap iterations must be >= 1");
        if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
    }
};

namespace detail {

/// Linear-interpolation sample quantile of sorted data (R type 7).
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Eigen::MatrixXd residuals_from_data(const VarModel& model, const EmaDataset& data) {
    const auto p = static_cast<Eigen::Index>(model.lags());
    const auto t = data.rows.rows();
    if (t <= p) throw BootstrapUnavailableError("dataset is shorter than the lag order");
    const bool use_exo = model.exo_count() > 0 && data.exogenous.cols() == static_cast<Eigen::Index>(model.exo_count());
    Eigen::MatrixXd e(t - p, data.rows.cols());
    for (Eigen::Index r = p; r < t; ++r) {
        Eigen::VectorXd fitted = model.constant;
        for (Eigen::Index lag = 1; lag <= p; ++lag)
            fitted.noalias() += model.coefficient_blocks[static_cast<std::size_t>(lag - 1)] * data.rows.row(r - lag).transpose();
        if (use_exo) fitted.noalias() += model.exo_coefficients * data.exogenous.row(r).transpose();
        e.row(r - p) = data.rows.row(r) - fitted.transpose();
    }
    return e;
}

struct BootstrapPlan {
    Eigen::MatrixXd residuals; ///< centered
    Eigen::MatrixXd initial;   ///< p x m
    Eigen::MatrixXd exogenous; ///< (T' + p) x l or empty
    VarModel generator;
};

inline BootstrapPlan make_plan(const VarModel& model, const EmaDataset* data) {
    const auto m = static_cast<Eigen::Index>(model.dimension());
    const auto p = static_cast<Eigen::Index>(model.lags());
    if (data && data->rows.cols() != m) throw ConfigError("dataset does not match the model's variables");
    if (data && data->rows.rows() <= p) data = nullptr;

    BootstrapPlan plan;
    plan.generator = model;
    if (data) {
        const auto t = data->rows.rows();
        plan.residuals = model.residuals && model.residuals->rows() == t - p ? *model.residuals
                                                                            : residuals_from_data(model, *data);
        plan.initial = data->rows.topRows(p);
        if (model.exo_count() > 0 && data->exogenous.cols() == static_cast<Eigen::Index>(model.exo_count()))
            plan.exogenous = data->exogenous;
    } else if (model.residuals && model.residuals->rows() > 0) {
        plan.residuals = *model.residuals;
        Eigen::MatrixXd lag_polynomial = Eigen::MatrixXd::Identity(m, m);
        for (const auto& b : model.coefficient_blocks) lag_polynomial -= b;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(lag_polynomial);
        const Eigen::VectorXd start = lu.isInvertible() ? Eigen::VectorXd(lu.solve(model.constant)) : Eigen::VectorXd::Zero(m);
        plan.initial = start.transpose().replicate(p, 1);
    } else {
        throw BootstrapUnavailableError("bootstrap needs fit residuals or the raw dataset");
    }
    if (plan.exogenous.size() == 0) {
        // Without exogenous series the replicates are generated and refit
        // without those regressors; responses do not depend on them.
        plan.generator.exo_names.clear();
        plan.generator.exo_coefficients.resize(0, 0);
    }
    plan.residuals = plan.residuals.rowwise() - plan.residuals.colwise().mean();
    return plan;
}

inline std::mt19937_64 replicate_engine(std::uint64_t seed, int replicate) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replicate)};
    return std::mt19937_64(seq);
}

/// Flattened [x][y][t] responses of one replicate, or empty if the refit failed.
inline std::vector<double> run_replicate(const BootstrapPlan& plan, int replicate, int k, std::uint64_t seed,
                                         const IrfOptions& opts) {
    const auto n = plan.residuals.rows();
    const auto m = plan.residuals.cols();
    auto engine = replicate_engine(seed, replicate);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Eigen::MatrixXd draws(n, m);
    for (Eigen::Index i = 0; i < n; ++i) draws.row(i) = plan.residuals.row(pick(engine));

    const Eigen::MatrixXd series = simulate_var(plan.generator, plan.initial, n, draws, plan.exogenous);
    try {
        const auto refit = fit_var(dataset_from_rows(plan.generator, series, plan.exogenous),
                                   static_cast<int>(plan.generator.lags()));
        IrfOptions local;
        local.orthogonalized = opts.orthogonalized;
        local.ordering = opts.ordering;
        const ResponseGrid grid(refit, k, local);
        const auto dim = static_cast<std::size_t>(m);
        std::vector<double> flat;
        flat.reserve(dim * dim * static_cast<std::size_t>(k + 1));
        for (std::size_t x = 0; x < dim; ++x)
            for (std::size_t y = 0; y < dim; ++y) {
                const auto& v = grid.at(x, y).values;
                flat.insert(flat.end(), v.begin(), v.end());
            }
        return flat;
    } catch (const FitError&) {
        return {};
    } catch (const DecompositionError&) {
        return {};
    }
}

} // namespace detail

/// Percentile bands for every response pair up to horizon @p k. Only the
/// orthogonalization settings of @p opts are used; bands are expressed for
/// the untransformed model.
inline ResponseBands bootstrap_bands(const VarModel& model, const EmaDataset* data, int k, const BootstrapConfig& cfg,
                                     const IrfOptions& opts = {}) {
    cfg.validate();
    if (k < 1) throw DomainError("horizon must be >= 1");
    const auto plan = detail::make_plan(model, data);

    std::vector<std::vector<double>> replicates(static_cast<std::size_t>(cfg.iterations));
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.iterations)));
    auto work = [&](unsigned w) {
        for (int r = static_cast<int>(w); r < cfg.iterations; r += static_cast<int>(workers))
            replicates[static_cast<std::size_t>(r)] = detail::run_replicate(plan, r, k, cfg.seed, opts);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    const auto m = model.dimension();
    const auto steps = static_cast<std::size_t>(k) + 1;
    std::vector<const std::vector<double>*> ok;
    for (const auto& r : replicates)
        if (!r.empty()) ok.push_back(&r);
    if (ok.empty()) throw FitError("every bootstrap replicate failed to refit");

    ResponseBands bands;
    bands.dimension = m;
    bands.horizon = k;
    bands.confidence = cfg.confidence;
    bands.replicates = ok.size();
    bands.lower.assign(m * m, std::vector<double>(steps));
    bands.upper.assign(m * m, std::vector<double>(steps));
    const double alpha = (1.0 - cfg.confidence) / 2.0;
    std::vector<double> sample(ok.size());
    for (std::size_t pair = 0; pair < m * m; ++pair)
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t i = 0; i < ok.size(); ++i) sample[i] = (*ok[i])[pair * steps + t];
            std::sort(sample.begin(), sample.end());
            bands.lower[pair][t] = detail::sorted_quantile(sample, alpha);
            bands.upper[pair][t] = detail::sorted_quantile(sample, 1.0 - alpha);
        }
    return bands;
}

/// Point response of @p y to a shock on @p x with bootstrap bands attached
/// (not masked).
inline ImpulseResponse bootstrap_irf(const VarModel& model, const EmaDataset* data, std::size_t x, std::size_t y, int k,
                                     const BootstrapConfig& cfg, const IrfOptions& opts = {}) {
    const auto bands = bootstrap_bands(model, data, k, cfg, opts);
    IrfOptions point = opts;
    point.bands.reset();
    point.polarity = false;
    auto resp = irf(x, y, k, model, point);
    ResponseGrid::attach_bands(resp, bands, 1.0);
    return resp;
}

} // namespace aira

#endif // AIRA_BOOTSTRAP_HPP
