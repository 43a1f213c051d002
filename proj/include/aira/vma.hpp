#ifndef AIRA_VMA_HPP
#define AIRA_VMA_HPP

/** @file
 * Vector moving-average coefficients of a VAR(p) and impulse responses
 * computed from them.
 *
 * The coefficients form a block lower-triangular grid C with
 *
 *   C(i,i) = B^i            (zero when i > p)
 *   C(i,j) = B^j * sum_{x=1}^{i-j} C(i-j, x)     for j < i,
 *
 * so that psi_i = sum_j C(i,j) is the i-step moving-average matrix and
 * psi_0 = I.
 */

#include <optional>
#include <vector>

#include "aira/model.hpp"
#include "aira/stability.hpp"

namespace aira {

/// Unit impulse on a single endogenous variable.
class ShockVector {
public:
    static ShockVector unit(std::size_t dimension, std::size_t index) {
        if (index >= dimension) throw DomainError("shock index out of range");
        Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
        e(static_cast<Eigen::Index>(index)) = 1.0;
        return ShockVector(std::move(e), index);
    }

    const Eigen::VectorXd& entries() const { return entries_; }
    std::size_t index() const { return index_; }

private:
    ShockVector(Eigen::VectorXd e, std::size_t i) : entries_(std::move(e)), index_(i) {}
    Eigen::VectorXd entries_;
    std::size_t index_;
};

class VmaCoefficients {
public:
    VmaCoefficients(std::size_t dimension, int horizon)
        : dimension_(dimension), horizon_(horizon),
          blocks_(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(horizon + 1) / 2,
                  Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dimension),
                                        static_cast<Eigen::Index>(dimension))) {}

    int horizon() const { return horizon_; }
    std::size_t dimension() const { return dimension_; }

    /// Block C(i,j), 1 <= j <= i <= horizon.
    const Eigen::MatrixXd& block(int i, int j) const { return blocks_[slot(i, j)]; }
    Eigen::MatrixXd& block(int i, int j) { return blocks_[slot(i, j)]; }

    /// psi_t; psi_0 is the identity.
    Eigen::MatrixXd psi(int t) const {
        const auto m = static_cast<Eigen::Index>(dimension_);
        if (t == 0) return Eigen::MatrixXd::Identity(m, m);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
        for (int j = 1; j <= t; ++j) sum += block(t, j);
        return sum;
    }

    /// d with (I - sum B^i) d = c; absent when that matrix is singular.
    std::optional<Eigen::VectorXd> equilibrium_offset;
    bool model_stable = true;

private:
    std::size_t slot(int i, int j) const {
        if (i < 1 || i > horizon_ || j < 1 || j > i) throw DomainError("VMA block index out of range");
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(i - 1) / 2 + static_cast<std::size_t>(j - 1);
    }

    std::size_t dimension_;
    int horizon_;
    std::vector<Eigen::MatrixXd> blocks_;
};

/// Coefficient block for lag @p j (1-based), or nullptr when the model has
/// fewer lags.
inline const Eigen::MatrixXd* lag_block(const VarModel& model, int j) {
    return j >= 1 && static_cast<std::size_t>(j) <= model.lags()
               ? &model.coefficient_blocks[static_cast<std::size_t>(j - 1)]
               : nullptr;
}

inline VmaCoefficients calculate_vma(const VarModel& model, int k) {
    if (k < 1) throw DomainError("horizon must be >= 1");
    const auto m = static_cast<Eigen::Index>(model.dimension());
    VmaCoefficients vma(model.dimension(), k);

    // Row sums of C are reused by every later row.
    std::vector<Eigen::MatrixXd> row_sum(static_cast<std::size_t>(k) + 1, Eigen::MatrixXd::Zero(m, m));
    for (int i = 1; i <= k; ++i) {
        for (int j = 1; j < i; ++j) {
            if (const auto* b = lag_block(model, j)) vma.block(i, j).noalias() = *b * row_sum[i - j];
        }
        if (const auto* b = lag_block(model, i)) vma.block(i, i) = *b;
        for (int j = 1; j <= i; ++j) row_sum[i] += vma.block(i, j);
    }

    Eigen::MatrixXd lag_polynomial = Eigen::MatrixXd::Identity(m, m);
    for (const auto& b : model.coefficient_blocks) lag_polynomial -= b;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lag_polynomial);
    if (lu.isInvertible()) vma.equilibrium_offset = lu.solve(model.constant);
    vma.model_stable = check_stability(model).stable;
    return vma;
}

/// Response of every variable to @p shock over steps 0..k. Column 0 is the
/// shock itself; column t >= 1 is sum_j C(t,j) * shock.
inline Eigen::MatrixXd calculate_irf(const Eigen::VectorXd& shock, const VmaCoefficients& vma, int k) {
    if (k < 0 || k > vma.horizon()) throw DomainError("horizon exceeds the VMA coefficients");
    if (static_cast<std::size_t>(shock.size()) != vma.dimension()) throw DomainError("shock has wrong length");
    const auto m = static_cast<Eigen::Index>(vma.dimension());
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, k + 1);
    y.col(0) = shock;
    for (int t = 1; t <= k; ++t)
        for (int i = 1; i <= t; ++i) y.col(t).noalias() += vma.block(t, i) * shock;
    return y;
}

inline Eigen::MatrixXd calculate_irf(const ShockVector& shock, const VmaCoefficients& vma, int k) {
    return calculate_irf(shock.entries(), vma, k);
}

} // namespace aira

#endif // AIRA_VMA_HPP
