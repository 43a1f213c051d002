#include <gtest/gtest.h>

#include <random>

#include "aira/aira.hpp"
#include "support.hpp"

using namespace aira;

namespace {

double max_abs(const Eigen::MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

VarModel with_covariance(VarModel model, const Eigen::MatrixXd& sigma) {
    model.residual_covariance = sigma;
    return model;
}

} // namespace

TEST(Vma, ScalarAr2Psi3) {
    const auto model = fixtures::scalar_ar({0.2, 0.3});
    const auto vma = calculate_vma(model, 3);
    // psi_1 = 0.2, psi_2 = 0.04 + 0.3, psi_3 = 0.2*0.34 + 0.3*0.2
    EXPECT_NEAR(vma.psi(1)(0, 0), 0.2, 1e-15);
    EXPECT_NEAR(vma.psi(2)(0, 0), 0.34, 1e-15);
    EXPECT_NEAR(vma.psi(3)(0, 0), 0.128, 1e-15);
    EXPECT_NEAR(vma.block(2, 2)(0, 0), 0.3, 0);
    EXPECT_EQ(vma.block(3, 3)(0, 0), 0.0);
    EXPECT_EQ(vma.psi(0), Eigen::MatrixXd::Identity(1, 1));
}

TEST(Vma, BlockIndexAndHorizonContracts) {
    const auto model = fixtures::scalar_ar({0.5});
    EXPECT_THROW(calculate_vma(model, 0), DomainError);
    const auto vma = calculate_vma(model, 4);
    EXPECT_THROW(vma.block(2, 3), DomainError);
    EXPECT_THROW(vma.block(5, 1), DomainError);
    EXPECT_THROW(calculate_irf(ShockVector::unit(1, 0), vma, 5), DomainError);
    EXPECT_THROW(ShockVector::unit(2, 2), DomainError);
}

TEST(Vma, EquilibriumOffsetSolvesLagPolynomial) {
    auto model = fixtures::two_variable_model();
    model.constant << 1.0, 2.0;
    const auto vma = calculate_vma(model, 2);
    ASSERT_TRUE(vma.equilibrium_offset.has_value());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2) - model.coefficient_blocks[0];
    EXPECT_LT(max_abs(a * *vma.equilibrium_offset - model.constant), 1e-14);
    EXPECT_TRUE(vma.model_stable);

    const auto unit_root = calculate_vma(fixtures::scalar_ar({1.0}), 2);
    EXPECT_FALSE(unit_root.equilibrium_offset.has_value());
    EXPECT_FALSE(unit_root.model_stable);
}

TEST(Vma, MatchesCompanionPowers) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = 2 + static_cast<std::size_t>(trial % 4);
        const auto p = 1 + static_cast<std::size_t>(trial % 3);
        const auto model = fixtures::random_stable_model(rng, m, p);
        const int k = 25;
        const auto vma = calculate_vma(model, k);
        const auto oracle = fixtures::companion_psi(model, k);
        for (int t = 0; t <= k; ++t) ASSERT_LT(max_abs(vma.psi(t) - oracle[static_cast<std::size_t>(t)]), 1e-12) << trial;
    }
}

TEST(Irf, EqualsShockedMinusBaselineSimulation) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = fixtures::random_stable_model(rng, 3, 1 + static_cast<std::size_t>(trial % 3));
        const int k = 15;
        const Eigen::VectorXd base = Eigen::VectorXd::Constant(3, 0.5);
        for (std::size_t x = 0; x < 3; ++x) {
            const Eigen::VectorXd e = ShockVector::unit(3, x).entries();
            const Eigen::MatrixXd diff =
                fixtures::trajectory(model, base, base + e, k) - fixtures::trajectory(model, base, base, k);
            for (std::size_t y = 0; y < 3; ++y) {
                const auto r = irf(x, y, k, model);
                for (int t = 0; t <= k; ++t)
                    ASSERT_NEAR(r.values[static_cast<std::size_t>(t)], diff(static_cast<Eigen::Index>(y), t), 1e-12);
            }
        }
    }
}

TEST(Irf, LinearInTheShock) {
    std::mt19937_64 rng(8);
    const auto model = fixtures::random_stable_model(rng, 4, 2);
    const auto vma = calculate_vma(model, 10);
    Eigen::VectorXd a(4), b(4);
    a << 1.0, -2.0, 0.5, 0.0;
    b << 0.3, 0.1, -1.0, 2.0;
    const Eigen::MatrixXd lhs = calculate_irf(Eigen::VectorXd(2.5 * a - 1.5 * b), vma, 10);
    const Eigen::MatrixXd rhs = 2.5 * calculate_irf(a, vma, 10) - 1.5 * calculate_irf(b, vma, 10);
    EXPECT_LT(max_abs(lhs - rhs), 1e-12);
}

TEST(Irf, TwoVariableSeries) {
    const auto model = fixtures::two_variable_model();
    const auto r = irf(0, 1, 3, model);
    const std::vector<double> expected{0.0, 0.3, 0.21, 0.117};
    ASSERT_EQ(r.values.size(), 4u);
    for (std::size_t t = 0; t < 4; ++t) EXPECT_NEAR(r.values[t], expected[t], 1e-15);
    EXPECT_NEAR(irf_cum(0, 1, 3, model), 0.627, 1e-14);
    EXPECT_NEAR(irf_cum(0, 0, 3, model), 1.875, 1e-14);
    EXPECT_EQ(irf_cum(1, 0, 3, model), 0.0);
    EXPECT_EQ(r.interval_minutes, 360.0);
    EXPECT_TRUE(r.model_stable);
}

TEST(Irf, AnalyticAr1) {
    const auto model = fixtures::scalar_ar({0.5});
    const auto r = irf(0, 0, 30, model);
    for (int t = 0; t <= 30; ++t) EXPECT_NEAR(r.values[static_cast<std::size_t>(t)], std::pow(0.5, t), 1e-12);
    for (int k : {1, 5, 30}) EXPECT_NEAR(irf_cum(0, 0, k, model), 2.0 * (1.0 - std::pow(0.5, k + 1)), 1e-12);
}

TEST(Irf, ConvergesForStableModels) {
    const auto model = fixtures::two_variable_model();
    EXPECT_NEAR(irf_cum(0, 0, 200, model), 2.0, 1e-12);
    EXPECT_NEAR(irf_cum(0, 1, 200, model), 2.0 - 1.25, 1e-12);
    EXPECT_LT(std::abs(irf(0, 1, 200, model).values.back()), 1e-12);
}

TEST(Irf, InvariantToConstantsAndExogenous) {
    std::mt19937_64 rng(21);
    auto model = fixtures::random_stable_model(rng, 3, 2);
    model.exo_names = {"w"};
    model.exo_coefficients = Eigen::MatrixXd::Zero(3, 1);
    auto shifted = model;
    shifted.constant << 4.0, -3.0, 9.0;
    shifted.exo_coefficients << 1.0, 2.0, -7.0;
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 3; ++y) EXPECT_EQ(irf(x, y, 12, model).values, irf(x, y, 12, shifted).values);
}

TEST(Irf, UnstableModelIsFlagged) {
    const auto r = irf(0, 0, 5, fixtures::scalar_ar({1.2}));
    EXPECT_FALSE(r.model_stable);
    EXPECT_NEAR(r.values[5], std::pow(1.2, 5), 1e-12);
}

TEST(Irf, ArgumentContracts) {
    const auto model = fixtures::two_variable_model();
    EXPECT_THROW(irf(2, 0, 3, model), DomainError);
    EXPECT_THROW(irf(0, 0, 0, model), DomainError);
    EXPECT_THROW(irf_total(5, 3, model), DomainError);
}

TEST(Polarity, GammaIsOuterProduct) {
    Eigen::VectorXd v(6);
    v << -1, 1, -1, 1, -1, 1;
    const auto g = gamma_matrix(v);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) EXPECT_EQ(g(i, j), ((i + j) % 2 == 0) ? 1.0 : -1.0);
    const auto e = exo_sign_matrix(v, 2);
    ASSERT_EQ(e.cols(), 2);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(e(i, 1), v(i));
}

TEST(Polarity, TransformIsAnInvolution) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        auto model = fixtures::random_stable_model(rng, 4, 2);
        model.exo_names = {"a", "b"};
        model.exo_coefficients = Eigen::MatrixXd::Random(4, 2);
        model.residuals = Eigen::MatrixXd::Random(20, 4);
        model.residual_covariance = sample_covariance(*model.residuals);
        EXPECT_EQ(polarity_transform(polarity_transform(model)), model);
    }
}

TEST(Polarity, FlipsCrossSignedEntriesOnly) {
    auto model = fixtures::two_variable_model();
    model.variables[1].polarity = Polarity::negative;
    const auto t = polarity_transform(model);
    EXPECT_EQ(t.coefficient_blocks[0](0, 0), 0.5);
    EXPECT_EQ(t.coefficient_blocks[0](1, 0), -0.3);
    EXPECT_EQ(t.coefficient_blocks[0](1, 1), 0.2);
    EXPECT_EQ(t.variables, model.variables);
    // Responses of the transformed model are the raw ones re-signed by v_x v_y.
    IrfOptions opts;
    opts.polarity = true;
    const auto raw = irf(0, 1, 6, model);
    const auto flipped = irf(0, 1, 6, model, opts);
    for (std::size_t s = 0; s <= 6; ++s) EXPECT_EQ(flipped.values[s], -raw.values[s]);
}

TEST(Polarity, IrfTotalUsesTransformedModel) {
    auto model = fixtures::two_variable_model();
    EXPECT_NEAR(irf_total(0, 3, model), 0.627, 1e-14);
    EXPECT_EQ(irf_total(1, 3, model), 0.0);
    model.variables[1].polarity = Polarity::negative;
    EXPECT_NEAR(irf_total(0, 3, model), -0.627, 1e-14);
}

TEST(Orthogonalize, FactorReproducesCovariance) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
        const Eigen::MatrixXd sigma = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
        const auto model = with_covariance(fixtures::random_stable_model(rng, 4, 1), sigma);
        const auto p = orthogonalize(model);
        EXPECT_LT(max_abs(p * p.transpose() - sigma), 1e-12);
        EXPECT_LT(max_abs(p.triangularView<Eigen::StrictlyUpper>().toDenseMatrix()), 1e-300);
        const auto q = orthogonalize(model, {3, 1, 0, 2});
        EXPECT_LT(max_abs(q * q.transpose() - sigma), 1e-12);
        // Variable 3 comes first in that ordering, so only its own shock moves it.
        EXPECT_EQ(q(3, 0), 0.0);
        EXPECT_EQ(q(3, 1), 0.0);
        EXPECT_EQ(q(3, 2), 0.0);
    }
}

TEST(Orthogonalize, KnownFactors) {
    auto model = fixtures::zero_model(2);
    model.residual_covariance = Eigen::Vector2d(4.0, 9.0).asDiagonal();
    EXPECT_LT(max_abs(orthogonalize(model) - Eigen::MatrixXd(Eigen::Vector2d(2.0, 3.0).asDiagonal())), 1e-15);

    model.residual_covariance << 1.0, 0.5, 0.5, 1.0;
    Eigen::MatrixXd expected(2, 2);
    expected << 1.0, 0.0, 0.5, std::sqrt(0.75);
    EXPECT_LT(max_abs(orthogonalize(model) - expected), 1e-15);

    model.residual_covariance << 1.0, 1.0, 1.0, 1.0;
    EXPECT_THROW(orthogonalize(model), DecompositionError);
    model.residual_covariance << 1.0, 0.0, 0.0, 1.0;
    EXPECT_THROW(orthogonalize(model, {0, 0}), DomainError);
}

TEST(Orthogonalize, ResponsesUseImpactMatrixAtEveryStep) {
    auto model = fixtures::two_variable_model();
    model.residual_covariance << 1.0, 0.5, 0.5, 1.0;
    const auto p = orthogonalize(model);
    const auto psi = fixtures::companion_psi(model, 6);
    IrfOptions opts;
    opts.orthogonalized = true;
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
            const auto r = irf(x, y, 6, model, opts);
            for (int t = 0; t <= 6; ++t)
                EXPECT_NEAR(r.values[static_cast<std::size_t>(t)],
                            (psi[static_cast<std::size_t>(t)] * p)(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)),
                            1e-14);
        }
}

TEST(Mask, ZeroesStepsWhoseBandContainsZero) {
    ImpulseResponse r;
    r.values = {1.0, 0.5, -0.2, 0.1};
    r.lower = std::vector<double>{0.9, -0.1, -0.3, 0.0};
    r.upper = std::vector<double>{1.1, 0.8, -0.1, 0.2};
    const auto m = significance_mask(r);
    EXPECT_EQ(m.values, (std::vector<double>{1.0, 0.0, -0.2, 0.0}));
    EXPECT_TRUE(m.masked);
    r.lower.reset();
    EXPECT_THROW(significance_mask(r), DomainError);
}

TEST(Mask, WiderBandsMaskAtLeastAsMuch) {
    ImpulseResponse r;
    r.values = {0.4, -0.3, 0.2, 0.05, -0.01};
    std::vector<double> half{0.1, 0.35, 0.1, 0.06, 0.02};
    int previous = -1;
    for (double scale : {0.5, 1.0, 2.0, 4.0}) {
        std::vector<double> lo, hi;
        for (std::size_t t = 0; t < r.values.size(); ++t) {
            lo.push_back(r.values[t] - scale * half[t]);
            hi.push_back(r.values[t] + scale * half[t]);
        }
        r.lower = lo;
        r.upper = hi;
        const auto m = significance_mask(r);
        const int zeros = static_cast<int>(std::count(m.values.begin(), m.values.end(), 0.0));
        EXPECT_GE(zeros, previous);
        previous = zeros;
    }
}

TEST(Mask, NegativePolarityFlipsBands) {
    auto model = fixtures::two_variable_model();
    model.variables[1].polarity = Polarity::negative;
    auto bands = std::make_shared<ResponseBands>();
    bands->dimension = 2;
    bands->horizon = 3;
    bands->lower.assign(4, {0.0, 0.1, 0.1, -0.1});
    bands->upper.assign(4, {0.0, 0.4, 0.3, 0.2});
    IrfOptions opts;
    opts.polarity = true;
    opts.bands = bands;
    const auto r = irf(0, 1, 3, model, opts);
    EXPECT_EQ(r.values[1], -0.3);
    EXPECT_EQ(r.values[3], 0.0);
    EXPECT_EQ((*r.lower)[1], -0.4);
    EXPECT_EQ((*r.upper)[1], -0.1);
}
