#ifndef AIRA_TESTS_SUPPORT_HPP
#define AIRA_TESTS_SUPPORT_HPP

// Fixtures and independent oracles shared by the test suites. Nothing here
// calls the VMA recursion or the IRF code paths it is used to check.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

#include "aira/model.hpp"

namespace aira::fixtures {

/// B1 = [[0.5, 0], [0.3, 0.2]]: var1 responds to var0, never the reverse.
inline VarModel two_variable_model() {
    Eigen::MatrixXd b(2, 2);
    b << 0.5, 0.0, 0.3, 0.2;
    auto model = make_model({"var0", "var1"}, {b}, 360.0);
    model.variables[0].mean = 5.0;
    model.variables[0].sd = 2.0;
    model.variables[1].mean = 4.0;
    model.variables[1].sd = 1.0;
    return model;
}

inline VarModel scalar_ar(std::vector<double> phis, double interval = 1.0) {
    std::vector<Eigen::MatrixXd> blocks;
    for (double phi : phis) blocks.push_back(Eigen::MatrixXd::Constant(1, 1, phi));
    return make_model({"x"}, std::move(blocks), interval);
}

inline VarModel zero_model(std::size_t m, std::size_t p = 1) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Eigen::MatrixXd> blocks(p, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
    return make_model(std::move(names), std::move(blocks));
}

/// Companion matrix built directly from the blocks.
inline Eigen::MatrixXd companion_oracle(const VarModel& model) {
    const auto m = static_cast<Eigen::Index>(model.dimension());
    const auto p = static_cast<Eigen::Index>(model.lags());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m * p, m * p);
    for (Eigen::Index l = 0; l < p; ++l)
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) a(i, l * m + j) = model.coefficient_blocks[l](i, j);
    for (Eigen::Index i = m; i < m * p; ++i) a(i, i - m) = 1.0;
    return a;
}

/// psi_t as the top-left block of companion^t, for t = 0..k.
inline std::vector<Eigen::MatrixXd> companion_psi(const VarModel& model, int k) {
    const auto m = static_cast<Eigen::Index>(model.dimension());
    const Eigen::MatrixXd a = companion_oracle(model);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    std::vector<Eigen::MatrixXd> out;
    for (int t = 0; t <= k; ++t) {
        out.push_back(power.topLeftCorner(m, m));
        power = a * power;
    }
    return out;
}

/// Noise-free simulation started from @p state0 at t = 0 (all earlier values
/// equal @p before); returns the m x (k+1) path.
inline Eigen::MatrixXd trajectory(const VarModel& model, const Eigen::VectorXd& before, const Eigen::VectorXd& state0,
                                  int k, const Eigen::VectorXd& exo = {}) {
    const auto m = static_cast<Eigen::Index>(model.dimension());
    const auto p = static_cast<int>(model.lags());
    std::vector<Eigen::VectorXd> hist(static_cast<std::size_t>(p), before);
    hist.push_back(state0);
    for (int t = 1; t <= k; ++t) {
        Eigen::VectorXd next = model.constant;
        for (int l = 1; l <= p; ++l) next += model.coefficient_blocks[l - 1] * hist[hist.size() - l];
        if (exo.size() > 0) next += model.exo_coefficients * exo;
        hist.push_back(next);
    }
    Eigen::MatrixXd path(m, k + 1);
    for (int t = 0; t <= k; ++t) path.col(t) = hist[static_cast<std::size_t>(p + t)];
    return path;
}

inline double spectral_radius_oracle(const VarModel& model) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion_oracle(model));
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Random VAR(p) rescaled so the companion spectral radius is at most
/// @p max_radius.
inline VarModel random_stable_model(std::mt19937_64& rng, std::size_t m, std::size_t p, double max_radius = 0.9) {
    std::normal_distribution<double> normal(0.0, 0.4);
    std::uniform_real_distribution<double> unit(0.1, max_radius);
    std::vector<Eigen::MatrixXd> blocks;
    const auto n = static_cast<Eigen::Index>(m);
    for (std::size_t l = 0; l < p; ++l) {
        Eigen::MatrixXd b(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) b(i, j) = normal(rng);
        blocks.push_back(b);
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m; ++i) names.push_back("v" + std::to_string(i));
    auto model = make_model(std::move(names), std::move(blocks));
    const double radius = spectral_radius_oracle(model);
    const double target = unit(rng);
    if (radius > 0.0) {
        // Scaling lag l by s^l scales every companion eigenvalue by s.
        const double s = target / radius;
        double f = 1.0;
        for (auto& b : model.coefficient_blocks) {
            f *= s;
            b *= f;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        model.variables[i].mean = 3.0 + static_cast<double>(i);
        model.variables[i].sd = 1.0 + 0.25 * static_cast<double>(i);
        model.variables[i].polarity = (rng() & 1u) ? Polarity::negative : Polarity::positive;
    }
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) model.constant(i) = c(rng);
    return model;
}

} // namespace aira::fixtures

#endif // AIRA_TESTS_SUPPORT_HPP
