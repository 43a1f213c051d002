#ifndef AIRA_IRF_HPP
#define AIRA_IRF_HPP

/** @file
 * Impulse responses, cumulative and total effects, the polarity
 * transformation and Cholesky orthogonalization.
 */

#include <Eigen/Cholesky>

#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "aira/vma.hpp"

namespace aira {

/// Per-step response of variable `response` to a unit shock on `impulse`.
/// values[0] is the impulse instant.
struct ImpulseResponse {
    std::size_t impulse = 0;
    std::size_t response = 0;
    std::vector<double> values;
    std::optional<std::vector<double>> lower;
    std::optional<std::vector<double>> upper;
    double confidence = 0.0;
    double interval_minutes = 0.0;
    bool model_stable = true;
    bool masked = false;

    bool has_bands() const { return lower.has_value() && upper.has_value(); }
    int horizon() const { return static_cast<int>(values.size()) - 1; }
};

/// Percentile bands for every (impulse, response) pair, in the orientation of
/// the untransformed model. Produced by the bootstrap.
struct ResponseBands {
    std::size_t dimension = 0;
    int horizon = 0;
    double confidence = 0.95;
    std::size_t replicates = 0;
    std::vector<std::vector<double>> lower; ///< [impulse * m + response][t]
    std::vector<std::vector<double>> upper;

    const std::vector<double>& lower_for(std::size_t x, std::size_t y) const { return lower[x * dimension + y]; }
    const std::vector<double>& upper_for(std::size_t x, std::size_t y) const { return upper[x * dimension + y]; }
};

struct IrfOptions {
    bool orthogonalized = false;
    /// Variable order for the Cholesky factorization; empty means model order.
    std::vector<std::size_t> ordering;
    /// Apply the polarity transform before computing responses.
    bool polarity = false;
    /// When set, responses carry these bands and are significance-masked.
    std::shared_ptr<const ResponseBands> bands;
};

/// Gamma = v v^T for the +/-1 polarity vector v.
inline Eigen::MatrixXd gamma_matrix(const Eigen::VectorXd& vlabels) {
    return vlabels * vlabels.transpose();
}

/// E = v 1_l^T: rows of negative variables are negated.
inline Eigen::MatrixXd exo_sign_matrix(const Eigen::VectorXd& vlabels, Eigen::Index exo_count) {
    return vlabels * Eigen::RowVectorXd::Ones(exo_count);
}

inline Eigen::VectorXd polarity_vector(const VarModel& model) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(model.dimension()));
    for (std::size_t i = 0; i < model.dimension(); ++i)
        v(static_cast<Eigen::Index>(i)) = polarity_sign(model.variables[i].polarity);
    return v;
}

/// Rewrites the model so that every variable reads as positive:
/// B^l -> Gamma o B^l and xi -> E o xi. The residuals and their covariance
/// are re-signed accordingly (D Sigma D with D = diag(v)) so orthogonalized
/// responses stay consistent. Labels are kept, which makes the transform an
/// involution.
inline VarModel polarity_transform(const VarModel& model) {
    const Eigen::VectorXd v = polarity_vector(model);
    const Eigen::MatrixXd gamma = gamma_matrix(v);
    VarModel out = model;
    for (auto& b : out.coefficient_blocks) b = gamma.cwiseProduct(b);
    if (out.exo_coefficients.size() > 0)
        out.exo_coefficients = exo_sign_matrix(v, out.exo_coefficients.cols()).cwiseProduct(out.exo_coefficients);
    out.residual_covariance = gamma.cwiseProduct(out.residual_covariance);
    if (out.residuals) *out.residuals = *out.residuals * v.asDiagonal();
    return out;
}

/// Factor P with P P^T = Sigma, lower triangular in the supplied ordering.
inline Eigen::MatrixXd orthogonalize(const VarModel& model, const std::vector<std::size_t>& ordering = {}) {
    const auto m = model.dimension();
    std::vector<std::size_t> order = ordering;
    if (order.empty()) {
        order.resize(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    std::vector<bool> seen(m, false);
    if (order.size() != m) throw DomainError("ordering must list every variable once");
    for (auto o : order) {
        if (o >= m || seen[o]) throw DomainError("ordering must list every variable once");
        seen[o] = true;
    }
    const auto n = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd permuted(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s)
            permuted(r, s) = model.residual_covariance(static_cast<Eigen::Index>(order[r]),
                                                       static_cast<Eigen::Index>(order[s]));
    Eigen::LLT<Eigen::MatrixXd> llt(permuted);
    if (llt.info() != Eigen::Success) throw DecompositionError("residual covariance is not positive definite");
    const Eigen::MatrixXd lower = llt.matrixL();
    if (!lower.allFinite() || (lower.diagonal().array() <= 0.0).any())
        throw DecompositionError("residual covariance is not positive definite");
    Eigen::MatrixXd p(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s)
            p(static_cast<Eigen::Index>(order[r]), static_cast<Eigen::Index>(order[s])) = lower(r, s);
    return p;
}

/// Zeroes every step whose band contains 0.
inline ImpulseResponse significance_mask(ImpulseResponse resp) {
    if (!resp.has_bands()) throw DomainError("significance mask needs confidence bands");
    for (std::size_t t = 0; t < resp.values.size(); ++t)
        if ((*resp.lower)[t] <= 0.0 && 0.0 <= (*resp.upper)[t]) resp.values[t] = 0.0;
    resp.masked = true;
    return resp;
}

/// Net area under the response over steps 0..upto.
inline double cumulative_effect(const ImpulseResponse& resp, int upto) {
    if (upto < 0) return 0.0;
    const auto last = std::min<std::size_t>(static_cast<std::size_t>(upto) + 1, resp.values.size());
    return std::accumulate(resp.values.begin(), resp.values.begin() + static_cast<std::ptrdiff_t>(last), 0.0);
}

inline double cumulative_effect(const ImpulseResponse& resp) { return cumulative_effect(resp, resp.horizon()); }

/// All m x m responses of one model to horizon k, sharing a single VMA grid.
class ResponseGrid {
public:
    ResponseGrid(const VarModel& model, int k, const IrfOptions& opts = {})
        : dimension_(model.dimension()), horizon_(k) {
        if (opts.bands && (opts.bands->dimension != dimension_ || opts.bands->horizon < k))
            throw DomainError("bootstrap bands do not cover the requested horizon");
        const VarModel working = opts.polarity ? polarity_transform(model) : model;
        const auto vma = calculate_vma(working, k);
        std::optional<Eigen::MatrixXd> impact;
        if (opts.orthogonalized) impact = orthogonalize(working, opts.ordering);
        const Eigen::VectorXd signs = polarity_vector(model);

        responses_.reserve(dimension_ * dimension_);
        for (std::size_t x = 0; x < dimension_; ++x) {
            const auto unit = ShockVector::unit(dimension_, x);
            const Eigen::VectorXd shock = impact ? Eigen::VectorXd(*impact * unit.entries()) : unit.entries();
            const Eigen::MatrixXd paths = calculate_irf(shock, vma, k);
            for (std::size_t y = 0; y < dimension_; ++y) {
                ImpulseResponse r;
                r.impulse = x;
                r.response = y;
                r.values.resize(static_cast<std::size_t>(k) + 1);
                for (int t = 0; t <= k; ++t) r.values[static_cast<std::size_t>(t)] = paths(static_cast<Eigen::Index>(y), t);
                r.interval_minutes = model.interval_minutes;
                r.model_stable = vma.model_stable;
                if (opts.bands) {
                    attach_bands(r, *opts.bands,
                                 opts.polarity ? signs(static_cast<Eigen::Index>(x)) * signs(static_cast<Eigen::Index>(y)) : 1.0);
                    r = significance_mask(std::move(r));
                }
                responses_.push_back(std::move(r));
            }
        }
    }

    const ImpulseResponse& at(std::size_t impulse, std::size_t response) const {
        if (impulse >= dimension_ || response >= dimension_) throw DomainError("variable index out of range");
        return responses_[impulse * dimension_ + response];
    }

    std::size_t dimension() const { return dimension_; }
    int horizon() const { return horizon_; }

    /// Bands are stored for the untransformed model; a negative sign flips them.
    static void attach_bands(ImpulseResponse& r, const ResponseBands& bands, double sign) {
        const auto n = r.values.size();
        const auto& lo = bands.lower_for(r.impulse, r.response);
        const auto& hi = bands.upper_for(r.impulse, r.response);
        std::vector<double> lower(lo.begin(), lo.begin() + static_cast<std::ptrdiff_t>(n));
        std::vector<double> upper(hi.begin(), hi.begin() + static_cast<std::ptrdiff_t>(n));
        if (sign < 0.0) {
            for (std::size_t t = 0; t < n; ++t) {
                const double l = lower[t];
                lower[t] = -upper[t];
                upper[t] = -l;
            }
        }
        r.lower = std::move(lower);
        r.upper = std::move(upper);
        r.confidence = bands.confidence;
    }

private:
    std::size_t dimension_;
    int horizon_;
    std::vector<ImpulseResponse> responses_;
};

namespace detail {
inline void check_pair(const VarModel& model, std::size_t x, std::size_t y) {
    if (x >= model.dimension() || y >= model.dimension()) throw DomainError("variable index out of range");
}
} // namespace detail

/// Response of @p y to a unit shock on @p x over steps 0..k.
inline ImpulseResponse irf(std::size_t x, std::size_t y, int k, const VarModel& model, const IrfOptions& opts = {}) {
    detail::check_pair(model, x, y);
    if (k < 1) throw DomainError("horizon must be >= 1");
    if (opts.bands && (opts.bands->dimension != model.dimension() || opts.bands->horizon < k))
        throw DomainError("bootstrap bands do not cover the requested horizon");
    const VarModel working = opts.polarity ? polarity_transform(model) : model;
    const auto vma = calculate_vma(working, k);
    Eigen::VectorXd shock = ShockVector::unit(model.dimension(), x).entries();
    if (opts.orthogonalized) shock = orthogonalize(working, opts.ordering) * shock;
    const Eigen::MatrixXd paths = calculate_irf(shock, vma, k);

    ImpulseResponse r;
    r.impulse = x;
    r.response = y;
    r.values.resize(static_cast<std::size_t>(k) + 1);
    for (int t = 0; t <= k; ++t) r.values[static_cast<std::size_t>(t)] = paths(static_cast<Eigen::Index>(y), t);
    r.interval_minutes = model.interval_minutes;
    r.model_stable = vma.model_stable;
    if (opts.bands) {
        const Eigen::VectorXd v = polarity_vector(model);
        ResponseGrid::attach_bands(r, *opts.bands,
                                   opts.polarity ? v(static_cast<Eigen::Index>(x)) * v(static_cast<Eigen::Index>(y)) : 1.0);
        r = significance_mask(std::move(r));
    }
    return r;
}

inline double irf_cum(std::size_t x, std::size_t y, int k, const VarModel& model, const IrfOptions& opts = {}) {
    return cumulative_effect(irf(x, y, k, model, opts));
}

/// Net effect of a shock on @p x on all other variables, evaluated on the
/// polarity-transformed model.
inline double irf_total(std::size_t x, int k, const VarModel& model, IrfOptions opts = {}) {
    detail::check_pair(model, x, x);
    opts.polarity = true;
    double total = 0.0;
    for (std::size_t y = 0; y < model.dimension(); ++y)
        if (y != x) total += irf_cum(x, y, k, model, opts);
    return total;
}

} // namespace aira

#endif // AIRA_IRF_HPP
