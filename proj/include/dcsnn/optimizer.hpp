#pragma once

// Full-batch Levenberg-Marquardt over a sum-of-squares loss.
//
// The damped Gauss-Newton system (J^T J + mu I) dp = J^T r is solved from a
// reduced SVD J = U S V^T, so that retrying a rejected step with a new mu only
// rescales the singular values:
//
//   dp = V diag(s / (s^2 + mu)) U^T r

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace dcsnn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LMConfig {
    double mu0 = 1e3;
    double mu_up = 3.0;
    double mu_down = 1.0 / 3.0;
    double mu_min = 1e-12;
    double mu_max = 1e12;
    int max_iters = 2000;
    double loss_tol = 1e-10;
    /// Consecutive rejections at mu_max that end the run.
    int stall_rejections = 25;

    void validate() const {
        if (!(mu_min > 0.0 && mu_min <= mu0 && mu0 <= mu_max)) {
            throw std::invalid_argument("LMConfig: need 0 < mu_min <= mu0 <= mu_max");
        }
        if (!(mu_up > 1.0)) throw std::invalid_argument("LMConfig: mu_up must exceed 1");
        if (!(mu_down > 0.0 && mu_down < 1.0)) throw std::invalid_argument("LMConfig: mu_down must lie in (0, 1)");
        if (!(loss_tol > 0.0)) throw std::invalid_argument("LMConfig: loss_tol must be positive");
        if (max_iters < 0) throw std::invalid_argument("LMConfig: max_iters must be nonnegative");
        if (stall_rejections < 1) throw std::invalid_argument("LMConfig: stall_rejections must be positive");
    }
};

/// Residual vector r(p) and its Jacobian dr/dp. The loss minimized is
/// |r(p)|^2, so any per-term weighting is folded into r by the model.
class ResidualModel {
public:
    virtual ~ResidualModel() = default;
    virtual Vector residuals(const Vector& p) const = 0;
    virtual Matrix jacobian(const Vector& p) const = 0;
    double loss(const Vector& p) const { return residuals(p).squaredNorm(); }
};

/// Adapts a pair of callables to ResidualModel.
class FunctionModel final : public ResidualModel {
public:
    using ResidualFn = std::function<Vector(const Vector&)>;
    using JacobianFn = std::function<Matrix(const Vector&)>;

    FunctionModel(ResidualFn r, JacobianFn j) : r_(std::move(r)), j_(std::move(j)) {}
    Vector residuals(const Vector& p) const override { return r_(p); }
    Matrix jacobian(const Vector& p) const override { return j_(p); }

private:
    ResidualFn r_;
    JacobianFn j_;
};

enum class StopReason { tolerance, max_iters, stall, numerical_failure };

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::tolerance: return "tolerance";
        case StopReason::max_iters: return "max_iters";
        case StopReason::stall: return "stall";
        case StopReason::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

struct TrainReport {
    Vector final_params;
    /// Entry 0 is the initial loss; entry k is the loss held after trial step k.
    std::vector<double> loss_history;
    /// Damping used by trial step k (entry k-1).
    std::vector<double> mu_history;
    /// Whether trial step k was accepted (entry k-1).
    std::vector<bool> accepted;
    int iterations = 0;
    StopReason stop_reason = StopReason::max_iters;
    std::string message;

    double final_loss() const { return loss_history.back(); }
    bool failed() const { return stop_reason == StopReason::numerical_failure; }
};

/// Reduced SVD of J with r projected once; step(mu) is then O(N_p * rank).
class DampedStep {
public:
    DampedStep(const Matrix& J, const Vector& r) {
        if (J.rows() != r.size()) throw std::invalid_argument("lm_step: J and r row counts differ");
        if (J.rows() < 1) throw std::invalid_argument("lm_step: empty residual");
        if (!J.allFinite() || !r.allFinite()) throw NumericalError("lm_step: non-finite entries in J or r");
        Eigen::BDCSVD<Matrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        singular_ = svd.singularValues();
        V_ = svd.matrixV();
        projected_ = svd.matrixU().transpose() * r;
    }

    Vector step(double mu) const {
        if (!(mu > 0.0)) throw std::invalid_argument("lm_step: mu must be positive");
        const Vector scale =
            (singular_.array() / (singular_.array().square() + mu) * projected_.array()).matrix();
        return V_ * scale;
    }

    const Vector& singular_values() const { return singular_; }

private:
    Vector singular_;
    Matrix V_;
    Vector projected_;
};

/// (J^T J + mu I)^{-1} J^T r via the reduced SVD of J.
inline Vector lm_step(const Matrix& J, const Vector& r, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("lm_step: mu must be positive");
    return DampedStep(J, r).step(mu);
}

/// Invoked with (iteration, current params, current loss) after every trial,
/// and once with iteration 0 before the first.
using TrainObserver = std::function<void(int, const Vector&, double)>;

inline TrainReport train(const ResidualModel& model, const Vector& p0, const LMConfig& cfg,
                         const TrainObserver& observer = {}) {
    cfg.validate();
    TrainReport report;
    Vector p = p0;
    Vector r = model.residuals(p);
    if (r.size() < 1) throw std::invalid_argument("train: model has no residuals");
    double loss = r.squaredNorm();
    report.loss_history.push_back(loss);
    if (observer) observer(0, p, loss);

    auto finish = [&](StopReason why, std::string msg = {}) {
        report.final_params = p;
        report.stop_reason = why;
        report.message = std::move(msg);
        return report;
    };

    if (!std::isfinite(loss)) return finish(StopReason::numerical_failure, "initial loss is not finite");
    if (loss <= cfg.loss_tol) return finish(StopReason::tolerance);

    double mu = cfg.mu0;
    int stalled = 0;
    std::optional<DampedStep> solver;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        if (!solver) {
            const Matrix J = model.jacobian(p);
            if (J.cols() != p.size()) throw std::invalid_argument("train: Jacobian column count differs from p");
            try {
                // r is the residual, J = dr/dp; the descent step is -(J^T J + mu I)^{-1} J^T r.
                solver.emplace(J, r);
            } catch (const NumericalError& e) {
                return finish(StopReason::numerical_failure, e.what());
            }
        }

        const Vector candidate = p - solver->step(mu);
        Vector r_new = model.residuals(candidate);
        const double loss_new = r_new.squaredNorm();

        report.iterations = iter;
        report.mu_history.push_back(mu);

        // A non-finite trial loss is treated like any other increase.
        const bool accept = std::isfinite(loss_new) && loss_new < loss;
        report.accepted.push_back(accept);
        if (accept) {
            p = candidate;
            r = std::move(r_new);
            loss = loss_new;
            mu = std::max(mu * cfg.mu_down, cfg.mu_min);
            stalled = 0;
            solver.reset();
        } else {
            mu = std::min(mu * cfg.mu_up, cfg.mu_max);
            stalled = mu >= cfg.mu_max ? stalled + 1 : 0;
        }
        report.loss_history.push_back(loss);
        if (observer) observer(iter, p, loss);

        if (loss <= cfg.loss_tol) return finish(StopReason::tolerance);
        if (stalled >= cfg.stall_rejections) return finish(StopReason::stall);
    }
    return finish(StopReason::max_iters);
}

}  // namespace dcsnn
