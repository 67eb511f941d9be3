#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "dcsnn/io.hpp"
#include "dcsnn/optimizer.hpp"
#include "oracles.hpp"

using namespace dcsnn;

namespace {

Matrix gaussian(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Matrix::NullaryExpr(rows, cols, [&] { return g(rng); });
}

/// r(p) = A p - b, J = A.
FunctionModel linear_model(const Matrix& A, const Vector& b) {
    return {[A, b](const Vector& p) -> Vector { return A * p - b; }, [A](const Vector&) -> Matrix { return A; }};
}

}  // namespace

TEST(LmStep, IdentityJacobian) {
    const Vector s = lm_step(Matrix::Identity(3, 3), Vector::Unit(3, 0), 1.0);
    EXPECT_NEAR(s(0), 0.5, 1e-15);
    EXPECT_NEAR(s(1), 0.0, 1e-15);
    EXPECT_NEAR(s(2), 0.0, 1e-15);
}

TEST(LmStep, MatchesNormalEquations) {
    std::mt19937_64 rng(8);
    const Matrix J = gaussian(8, 5, rng);
    const Vector r = gaussian(8, 1, rng);
    EXPECT_LT((lm_step(J, r, 0.37) - oracle::normal_equation_step(J, r, 0.37)).norm(), 1e-10);
    for (int k = 0; k < 50; ++k) {
        const int rows = 2 + static_cast<int>(rng() % 30), cols = 1 + static_cast<int>(rng() % 20);
        const Matrix A = gaussian(rows, cols, rng);
        const Vector b = gaussian(rows, 1, rng);
        const double mu = std::pow(10.0, std::uniform_real_distribution<double>(-4, 4)(rng));
        const Vector ref = oracle::normal_equation_step(A, b, mu);
        EXPECT_LT((lm_step(A, b, mu) - ref).norm(), 1e-10 * std::max(1.0, ref.norm())) << rows << "x" << cols;
    }
}

TEST(LmStep, LargeDampingApproachesScaledGradient) {
    std::mt19937_64 rng(4);
    const Matrix J = gaussian(8, 5, rng);
    const Vector r = gaussian(8, 1, rng);
    const double mu = 1e12;
    const Vector g = J.transpose() * r / mu;
    EXPECT_LT((lm_step(J, r, mu) - g).norm() / g.norm(), 1e-4);
}

TEST(LmStep, RejectsBadInput) {
    const Matrix J = Matrix::Identity(2, 2);
    EXPECT_THROW(lm_step(J, Vector::Ones(2), 0.0), std::invalid_argument);
    EXPECT_THROW(lm_step(J, Vector::Ones(3), 1.0), std::invalid_argument);
    Matrix bad = J;
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(lm_step(bad, Vector::Ones(2), 1.0), NumericalError);
}

TEST(LmConfig, Validation) {
    LMConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.mu0, 1e3);
    EXPECT_EQ(c.mu_up, 3.0);
    EXPECT_EQ(c.max_iters, 2000);
    c.mu_up = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.mu_down = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.mu0 = 1e13;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.loss_tol = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Train, LinearLeastSquaresConvergesToSolution) {
    std::mt19937_64 rng(12);
    const Matrix A = gaussian(6, 6, rng) + 4.0 * Matrix::Identity(6, 6);
    const Vector b = gaussian(6, 1, rng);
    LMConfig cfg;
    cfg.loss_tol = 1e-24;
    cfg.max_iters = 500;
    const auto rep = train(linear_model(A, b), Vector::Zero(6), cfg);
    const Vector exact = A.lu().solve(b);
    EXPECT_LT((rep.final_params - exact).norm(), 1e-8);
    EXPECT_NE(rep.stop_reason, StopReason::numerical_failure);
}

TEST(Train, LinearLeastSquaresNeedsFewStepsWithSmallDamping) {
    std::mt19937_64 rng(13);
    const Matrix A = gaussian(5, 5, rng) + 4.0 * Matrix::Identity(5, 5);
    const Vector b = gaussian(5, 1, rng);
    LMConfig cfg;
    cfg.mu0 = 1e-6;
    cfg.loss_tol = 1e-20;
    cfg.max_iters = 100;
    const auto rep = train(linear_model(A, b), Vector::Zero(5), cfg);
    int accepted = 0;
    for (bool a : rep.accepted) accepted += a ? 1 : 0;
    EXPECT_LE(accepted, 10);
    EXPECT_LT((rep.final_params - A.lu().solve(b)).norm(), 1e-12 * A.lu().solve(b).norm());
}

TEST(Train, ZeroInitialResidualStopsImmediately) {
    const Matrix A = Matrix::Identity(3, 3);
    const Vector b = Vector::Ones(3);
    const auto rep = train(linear_model(A, b), b, LMConfig{});
    EXPECT_EQ(rep.iterations, 0);
    EXPECT_EQ(rep.stop_reason, StopReason::tolerance);
    EXPECT_EQ(rep.loss_history.size(), 1u);
}

TEST(Train, ZeroIterationsReturnsInitialPoint) {
    LMConfig cfg;
    cfg.max_iters = 0;
    const Vector p0 = Vector::Constant(2, 3.0);
    const auto rep = train(linear_model(Matrix::Identity(2, 2), Vector::Zero(2)), p0, cfg);
    EXPECT_EQ(rep.final_params, p0);
    EXPECT_EQ(rep.stop_reason, StopReason::max_iters);
    EXPECT_EQ(rep.final_loss(), 18.0);
}

// Rosenbrock as residuals (10 (y - x^2), 1 - x).
TEST(Train, AcceptedStepsStrictlyDecreaseAndDampingFollowsRule) {
    FunctionModel rosen([](const Vector& p) -> Vector { return Vector{{10 * (p(1) - p(0) * p(0)), 1 - p(0)}}; },
                        [](const Vector& p) -> Matrix { return Matrix{{-20 * p(0), 10.0}, {-1.0, 0.0}}; });
    LMConfig cfg;
    cfg.loss_tol = 1e-20;
    cfg.max_iters = 300;
    const auto rep = train(rosen, Vector{{-1.2, 1.0}}, cfg);
    ASSERT_EQ(rep.mu_history.size(), static_cast<std::size_t>(rep.iterations));
    ASSERT_EQ(rep.loss_history.size(), static_cast<std::size_t>(rep.iterations) + 1);
    for (int k = 0; k < rep.iterations; ++k) {
        if (rep.accepted[k]) {
            EXPECT_LT(rep.loss_history[k + 1], rep.loss_history[k]);
        } else {
            EXPECT_EQ(rep.loss_history[k + 1], rep.loss_history[k]);
        }
        if (k + 1 < rep.iterations) {
            const double expected = rep.accepted[k] ? std::max(rep.mu_history[k] * cfg.mu_down, cfg.mu_min)
                                                    : std::min(rep.mu_history[k] * cfg.mu_up, cfg.mu_max);
            EXPECT_DOUBLE_EQ(rep.mu_history[k + 1], expected);
        }
    }
    EXPECT_LT((rep.final_params - Vector::Ones(2)).norm(), 1e-8);
}

TEST(Train, StallsWhenNoStepHelps) {
    // The Jacobian points the wrong way, so every step increases the loss.
    FunctionModel wrong([](const Vector& p) -> Vector { return p; },
                        [](const Vector& p) -> Matrix { return -Matrix::Identity(p.size(), p.size()); });
    LMConfig cfg;
    cfg.mu0 = 1e10;
    cfg.max_iters = 1000;
    const auto rep = train(wrong, Vector::Ones(2), cfg);
    EXPECT_EQ(rep.stop_reason, StopReason::stall);
    EXPECT_EQ(rep.final_params, Vector::Ones(2));
}

TEST(Train, NonFiniteTrialCountsAsRejection) {
    // Residual blows up for any p(0) > 1.5; the first Gauss-Newton steps overshoot there.
    FunctionModel model(
        [](const Vector& p) -> Vector {
            if (p(0) > 1.5) return Vector::Constant(1, std::numeric_limits<double>::infinity());
            return Vector::Constant(1, p(0) - 1.0);
        },
        [](const Vector&) -> Matrix { return Matrix::Constant(1, 1, 0.1); });
    LMConfig cfg;
    cfg.mu0 = 1e-6;
    cfg.loss_tol = 1e-20;
    cfg.max_iters = 200;
    const auto rep = train(model, Vector::Zero(1), cfg);
    EXPECT_FALSE(rep.accepted.front());
    EXPECT_NE(rep.stop_reason, StopReason::numerical_failure);
    EXPECT_TRUE(std::isfinite(rep.final_loss()));
}

TEST(Train, NonFiniteInitialLossIsNumericalFailure) {
    FunctionModel model([](const Vector&) -> Vector { return Vector::Constant(1, std::nan("")); },
                        [](const Vector&) -> Matrix { return Matrix::Ones(1, 1); });
    const auto rep = train(model, Vector::Zero(1), LMConfig{});
    EXPECT_TRUE(rep.failed());
}

TEST(Train, NonFiniteJacobianIsNumericalFailure) {
    FunctionModel model([](const Vector& p) -> Vector { return p; },
                        [](const Vector&) -> Matrix { return Matrix::Constant(1, 1, std::nan("")); });
    const auto rep = train(model, Vector::Ones(1), LMConfig{});
    EXPECT_EQ(rep.stop_reason, StopReason::numerical_failure);
    EXPECT_FALSE(rep.message.empty());
}

TEST(Train, ReportSerializes) {
    const auto rep = train(linear_model(Matrix::Identity(2, 2), Vector::Ones(2)), Vector::Zero(2), LMConfig{});
    const auto j = report_to_json(rep);
    EXPECT_EQ(j.at("iterations"), rep.iterations);
    EXPECT_EQ(j.at("loss_history").size(), rep.loss_history.size());
    EXPECT_EQ(j.at("stop_reason"), std::string(to_string(rep.stop_reason)));
    std::ostringstream csv;
    write_loss_history_csv(csv, rep);
    EXPECT_EQ(csv.str().rfind("iteration,loss\n0,", 0), 0u);
}
