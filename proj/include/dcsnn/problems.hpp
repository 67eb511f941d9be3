#pragma once

// Residual models for piecewise function fitting and for the augmented
// elliptic interface problem
//
//   Lap_x phi_aug(x, z) = f~    (z = -1 in the inner region, +1 outside)
//   [phi_aug] = v,  [beta d_n phi_aug] = w  on the interface,
//   phi_aug(x, 1) = g           on the domain boundary,
//
// where [q] = q(x, 1) - q(x, -1). Each residual block carries the square
// root of its loss weight so that |r|^2 is the mean-squared training loss.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dcsnn/geometry.hpp"
#include "dcsnn/network.hpp"
#include "dcsnn/optimizer.hpp"
#include "dcsnn/parallel.hpp"

namespace dcsnn {

/// A smooth map on the whole bounding box with its gradient and Laplacian.
struct SmoothField {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<double(const Vector&)> laplacian;
};

/// phi = minus on the inner region, plus on the outer one; both pieces are
/// global smooth extensions.
struct PiecewiseField {
    std::string name;
    SmoothField minus;
    SmoothField plus;

    const SmoothField& piece(double z) const { return z < 0.0 ? minus : plus; }
    double operator()(const Vector& x, Region r) const { return piece(label(r)).value(x); }
};

namespace fields {

inline SmoothField product_exp(int d) {
    auto prod = [](const Vector& x) { return x.array().exp().prod(); };
    return {prod, [prod](const Vector& x) -> Vector { return Vector::Constant(x.size(), prod(x)); },
            [prod, d](const Vector& x) { return d * prod(x); }};
}

inline SmoothField product_sin(int d) {
    auto prod = [](const Vector& x) { return x.array().sin().prod(); };
    auto grad = [](const Vector& x) -> Vector {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double v = std::cos(x(i));
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                if (j != i) v *= std::sin(x(j));
            }
            g(i) = v;
        }
        return g;
    };
    return {prod, grad, [prod, d](const Vector& x) { return -d * prod(x); }};
}

/// exp(|x|^2) in two dimensions.
inline SmoothField radial_exp() {
    return {[](const Vector& x) { return std::exp(x.squaredNorm()); },
            [](const Vector& x) -> Vector { return 2.0 * std::exp(x.squaredNorm()) * x; },
            [](const Vector& x) {
                const double r2 = x.squaredNorm();
                return (4.0 + 4.0 * r2) * std::exp(r2);
            }};
}

/// 0.1 |x|^4 - 0.01 log(2 |x|) in two dimensions; the log term is harmonic.
inline SmoothField quartic_log() {
    return {[](const Vector& x) {
                const double r2 = x.squaredNorm();
                return 0.1 * r2 * r2 - 0.01 * std::log(2.0 * std::sqrt(r2));
            },
            [](const Vector& x) -> Vector {
                const double r2 = x.squaredNorm();
                return (0.4 * r2 - 0.01 / r2) * x;
            },
            [](const Vector& x) { return 1.6 * x.squaredNorm(); }};
}

inline SmoothField sine_wave(double k) {
    return {[k](const Vector& x) { return std::sin(k * x(0)); },
            [k](const Vector& x) -> Vector { return Vector::Constant(1, k * std::cos(k * x(0))); },
            [k](const Vector& x) { return -k * k * std::sin(k * x(0)); }};
}

inline SmoothField cosine_wave(double k) {
    return {[k](const Vector& x) { return std::cos(k * x(0)); },
            [k](const Vector& x) -> Vector { return Vector::Constant(1, -k * std::sin(k * x(0))); },
            [k](const Vector& x) { return -k * k * std::cos(k * x(0)); }};
}

/// prod exp(x_i) inside, prod sin(x_i) outside.
inline PiecewiseField exp_sin(int d) { return {"exp_sin", product_exp(d), product_sin(d)}; }

inline PiecewiseField radial_pair() { return {"radial_pair", radial_exp(), quartic_log()}; }

inline PiecewiseField sin_cos_2pi() {
    const double k = 2.0 * std::numbers::pi;
    return {"sin_cos_2pi", sine_wave(k), cosine_wave(k)};
}

inline PiecewiseField by_name(const std::string& name, int d) {
    if (name == "exp_sin") return exp_sin(d);
    if (name == "radial_pair") return radial_pair();
    if (name == "sin_cos_2pi") return sin_cos_2pi();
    throw std::invalid_argument("unknown exact field: " + name);
}

}  // namespace fields

/// Anything that can be evaluated like phi_aug: value, spatial gradient and
/// spatial Laplacian at (x, z).
template <typename F>
concept AugmentedField = requires(const F& f, const Vector& x, double z) {
    { f.value(x, z) } -> std::convertible_to<double>;
    { f.gradient(x, z) } -> std::convertible_to<Vector>;
    { f.laplacian(x, z) } -> std::convertible_to<double>;
};

struct NetworkField {
    const ShallowNetParams& params;

    double value(const Vector& x, double z) const { return forward(params, {x, z}); }
    Vector gradient(const Vector& x, double z) const { return spatial_gradient(params, {x, z}).head(params.d); }
    double laplacian(const Vector& x, double z) const { return spatial_laplacian(params, {x, z}); }
};

/// The exact piecewise field viewed as an augmented function.
struct ExactField {
    const PiecewiseField& field;

    double value(const Vector& x, double z) const { return field.piece(z).value(x); }
    Vector gradient(const Vector& x, double z) const { return field.piece(z).gradient(x); }
    double laplacian(const Vector& x, double z) const { return field.piece(z).laplacian(x); }
};

struct InterfaceProblem {
    LevelSetGeometry geom;
    double beta_minus = 1.0;
    double beta_plus = 1.0;
    std::optional<PiecewiseField> exact;
    /// f~ = f / beta on each region.
    std::function<double(const Vector&, Region)> rhs;
    /// Jump of phi across the interface.
    std::function<double(const Vector&)> v;
    /// Jump of beta d_n phi; receives the point and its unit normal.
    std::function<double(const Vector&, const Vector&)> w;
    /// Dirichlet data on the domain boundary.
    std::function<double(const Vector&)> g;
    double alpha_b = 1.0;
    double alpha_gamma = 1.0;

    double beta(double z) const { return z < 0.0 ? beta_minus : beta_plus; }

    void validate() const {
        if (!(beta_minus > 0.0 && beta_plus > 0.0)) {
            throw std::invalid_argument("InterfaceProblem: diffusion coefficients must be positive");
        }
        if (!(alpha_b > 0.0 && alpha_gamma > 0.0)) {
            throw std::invalid_argument("InterfaceProblem: penalty weights must be positive");
        }
        if (!rhs || !v || !w || !g) throw std::invalid_argument("InterfaceProblem: missing data callbacks");
    }
};

/// Problem data without the derived right-hand side and jumps.
struct ProblemSkeleton {
    LevelSetGeometry geom;
    double beta_minus = 1.0;
    double beta_plus = 1.0;
    PiecewiseField exact;
    double alpha_b = 1.0;
    double alpha_gamma = 1.0;
};

/// Derives f~, v, w and g from a manufactured solution.
inline InterfaceProblem manufacture(const ProblemSkeleton& s) {
    InterfaceProblem p{s.geom, s.beta_minus, s.beta_plus, s.exact, {}, {}, {}, {}, s.alpha_b, s.alpha_gamma};
    const PiecewiseField ex = s.exact;
    const double bm = s.beta_minus, bp = s.beta_plus;
    p.rhs = [ex](const Vector& x, Region r) { return ex.piece(label(r)).laplacian(x); };
    p.v = [ex](const Vector& x) { return ex.plus.value(x) - ex.minus.value(x); };
    p.w = [ex, bm, bp](const Vector& x, const Vector& n) {
        return bp * ex.plus.gradient(x).dot(n) - bm * ex.minus.gradient(x).dot(n);
    };
    p.g = [ex](const Vector& x) { return ex.plus.value(x); };
    p.validate();
    return p;
}

/// Row offsets of the four residual blocks.
struct BlockLayout {
    std::size_t interior, boundary, jump, flux, total;

    explicit BlockLayout(const CollocationSet& c)
        : interior(0),
          boundary(c.M()),
          jump(c.M() + c.M_b()),
          flux(c.M() + c.M_b() + c.M_gamma()),
          total(c.M() + c.M_b() + 2 * c.M_gamma()) {}
};

namespace detail {

inline void check_collocation(const CollocationSet& c, int d) {
    if (c.interior.empty() || c.boundary.empty() || c.interface.empty()) {
        throw std::invalid_argument("pde_residuals: every collocation role needs at least one point");
    }
    for (const auto& s : c.interface) {
        if (s.n.size() != d) throw std::invalid_argument("pde_residuals: interface point without a normal");
    }
}

}  // namespace detail

/// Stacked residual [interior; boundary; jump; flux jump] whose squared norm
/// is the collocation loss.
template <AugmentedField F>
Vector pde_residuals(const F& phi, const InterfaceProblem& prob, const CollocationSet& colloc) {
    detail::check_collocation(colloc, prob.geom.dim());
    const BlockLayout at(colloc);
    const double s_in = 1.0 / std::sqrt(static_cast<double>(colloc.M()));
    const double s_b = std::sqrt(prob.alpha_b / static_cast<double>(colloc.M_b()));
    const double s_g = std::sqrt(prob.alpha_gamma / static_cast<double>(colloc.M_gamma()));

    Vector r(static_cast<Eigen::Index>(at.total));
    for (std::size_t i = 0; i < colloc.M(); ++i) {
        const auto& pt = colloc.interior[i];
        const Region region = pt.z < 0.0 ? Region::inside : Region::outside;
        r(at.interior + i) = s_in * (phi.laplacian(pt.x, pt.z) - prob.rhs(pt.x, region));
    }
    for (std::size_t j = 0; j < colloc.M_b(); ++j) {
        const auto& x = colloc.boundary[j];
        r(at.boundary + j) = s_b * (phi.value(x, 1.0) - prob.g(x));
    }
    for (std::size_t k = 0; k < colloc.M_gamma(); ++k) {
        const auto& [x, n] = colloc.interface[k];
        r(at.jump + k) = s_g * (phi.value(x, 1.0) - phi.value(x, -1.0) - prob.v(x));
        const double flux = prob.beta_plus * phi.gradient(x, 1.0).dot(n) -
                            prob.beta_minus * phi.gradient(x, -1.0).dot(n);
        r(at.flux + k) = s_g * (flux - prob.w(x, n));
    }
    return r;
}

/// d(pde_residuals)/dp for the shallow network, same row layout.
inline Matrix pde_jacobian(const ShallowNetParams& params, const InterfaceProblem& prob,
                           const CollocationSet& colloc) {
    detail::check_collocation(colloc, params.d);
    const BlockLayout at(colloc);
    const double s_in = 1.0 / std::sqrt(static_cast<double>(colloc.M()));
    const double s_b = std::sqrt(prob.alpha_b / static_cast<double>(colloc.M_b()));
    const double s_g = std::sqrt(prob.alpha_gamma / static_cast<double>(colloc.M_gamma()));
    const auto cols = static_cast<Eigen::Index>(params.size());

    Matrix J(static_cast<Eigen::Index>(at.total), cols);
    const std::size_t tasks = colloc.M() + colloc.M_b() + colloc.M_gamma();
    parallel_for(tasks, [&](std::size_t t) {
        if (t < colloc.M()) {
            const auto& pt = colloc.interior[t];
            auto row = J.row(static_cast<Eigen::Index>(at.interior + t));
            param_jacobian_row(params, {pt.x, pt.z}, JacobianKind::laplacian, nullptr, row);
            row *= s_in;
            return;
        }
        t -= colloc.M();
        if (t < colloc.M_b()) {
            auto row = J.row(static_cast<Eigen::Index>(at.boundary + t));
            param_jacobian_row(params, {colloc.boundary[t], 1.0}, JacobianKind::value, nullptr, row);
            row *= s_b;
            return;
        }
        t -= colloc.M_b();
        const auto& [x, n] = colloc.interface[t];
        Eigen::RowVectorXd plus(cols), minus(cols);
        param_jacobian_row(params, {x, 1.0}, JacobianKind::value, nullptr, plus);
        param_jacobian_row(params, {x, -1.0}, JacobianKind::value, nullptr, minus);
        J.row(static_cast<Eigen::Index>(at.jump + t)) = s_g * (plus - minus);
        param_jacobian_row(params, {x, 1.0}, JacobianKind::normal_derivative, &n, plus);
        param_jacobian_row(params, {x, -1.0}, JacobianKind::normal_derivative, &n, minus);
        J.row(static_cast<Eigen::Index>(at.flux + t)) = s_g * (prob.beta_plus * plus - prob.beta_minus * minus);
    });
    return J;
}

class PdeModel final : public ResidualModel {
public:
    PdeModel(int d, int N, const InterfaceProblem& prob, const CollocationSet& colloc)
        : d_(d), N_(N), prob_(&prob), colloc_(&colloc) {
        prob.validate();
        detail::check_collocation(colloc, d);
    }

    Vector residuals(const Vector& p) const override {
        const auto params = ShallowNetParams::unflatten(d_, N_, p);
        return pde_residuals(NetworkField{params}, *prob_, *colloc_);
    }
    Matrix jacobian(const Vector& p) const override {
        return pde_jacobian(ShallowNetParams::unflatten(d_, N_, p), *prob_, *colloc_);
    }

private:
    int d_, N_;
    const InterfaceProblem* prob_;
    const CollocationSet* colloc_;
};

struct FitSample {
    Vector x;
    double z = 1.0;
    double target = 0.0;
};

/// r_i = (target_i - phi_aug(x_i, z_i)) / sqrt(M).
inline Vector fit_residuals(const ShallowNetParams& params, const std::vector<FitSample>& data) {
    if (data.empty()) throw std::invalid_argument("fit_residuals: empty dataset");
    const double s = 1.0 / std::sqrt(static_cast<double>(data.size()));
    Vector r(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        r(static_cast<Eigen::Index>(i)) = s * (data[i].target - forward(params, {data[i].x, data[i].z}));
    }
    return r;
}

/// d(fit_residuals)/dp = -J_value / sqrt(M).
inline Matrix fit_jacobian(const ShallowNetParams& params, const std::vector<FitSample>& data) {
    if (data.empty()) throw std::invalid_argument("fit_jacobian: empty dataset");
    const double s = -1.0 / std::sqrt(static_cast<double>(data.size()));
    Matrix J(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(params.size()));
    parallel_for(data.size(), [&](std::size_t i) {
        auto row = J.row(static_cast<Eigen::Index>(i));
        param_jacobian_row(params, {data[i].x, data[i].z}, JacobianKind::value, nullptr, row);
        row *= s;
    });
    return J;
}

class FitModel final : public ResidualModel {
public:
    FitModel(int d, int N, const std::vector<FitSample>& data) : d_(d), N_(N), data_(&data) {
        if (data.empty()) throw std::invalid_argument("FitModel: empty dataset");
    }
    Vector residuals(const Vector& p) const override {
        return fit_residuals(ShallowNetParams::unflatten(d_, N_, p), *data_);
    }
    Matrix jacobian(const Vector& p) const override {
        return fit_jacobian(ShallowNetParams::unflatten(d_, N_, p), *data_);
    }

private:
    int d_, N_;
    const std::vector<FitSample>* data_;
};

struct ErrorReport {
    double l_inf = 0.0;
    /// Root-mean-square error over the test points.
    double l2 = 0.0;
    /// l2 divided by the root-mean-square of the exact solution.
    double rel_l2 = 0.0;
    std::size_t n_test = 0;
    std::uint64_t seed = 0;
};

/// Testing errors of `approx(x, z)` at n_test points drawn uniformly over the
/// domain, each evaluated on its own region's piece.
template <typename Approx>
ErrorReport evaluate_errors(const Approx& approx, const LevelSetGeometry& geom, const PiecewiseField& exact,
                            std::size_t n_test, std::uint64_t seed) {
    if (n_test < 1) throw std::invalid_argument("evaluate_errors: n_test must be positive");
    std::mt19937_64 rng(seed);
    RejectionSampler sampler(geom);
    ErrorReport rep;
    rep.n_test = n_test;
    rep.seed = seed;
    double sq_err = 0.0, sq_ref = 0.0;
    for (std::size_t i = 0; i < n_test; ++i) {
        const Vector x = sampler.draw(rng);
        const Region region = classify(geom, x);
        const double ref = exact(x, region);
        const double err = std::abs(approx(x, label(region)) - ref);
        rep.l_inf = std::max(rep.l_inf, err);
        sq_err += err * err;
        sq_ref += ref * ref;
    }
    rep.l2 = std::sqrt(sq_err / static_cast<double>(n_test));
    rep.rel_l2 = sq_ref > 0.0 ? std::sqrt(sq_err / sq_ref) : std::numeric_limits<double>::infinity();
    return rep;
}

inline ErrorReport evaluate_errors(const ShallowNetParams& params, const LevelSetGeometry& geom,
                                   const PiecewiseField& exact, std::size_t n_test, std::uint64_t seed) {
    return evaluate_errors([&](const Vector& x, double z) { return forward(params, {x, z}); }, geom, exact,
                           n_test, seed);
}

inline ErrorReport evaluate_errors(const ShallowNetParams& params, const InterfaceProblem& prob,
                                   std::size_t n_test, std::uint64_t seed) {
    if (!prob.exact) throw std::invalid_argument("evaluate_errors: problem has no exact solution");
    return evaluate_errors(params, prob.geom, *prob.exact, n_test, seed);
}

}  // namespace dcsnn
