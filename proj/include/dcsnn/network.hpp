#pragma once

// One-hidden-layer network over the augmented input (x, z):
//
//   phi_aug(x, z) = W2 . sigma(W1 (x, z)^T + b1) + b2
//
// All derivatives needed by the collocation residuals (spatial gradient,
// spatial Laplacian, normal derivative and their parameter Jacobians) are
// written out in closed form.

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcsnn/parallel.hpp"

namespace dcsnn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ActivationKind { sigmoid };

/// Scalar activation with its first three derivatives.
struct Activation {
    ActivationKind kind = ActivationKind::sigmoid;

    static double sigma(double t) { return 1.0 / (1.0 + std::exp(-t)); }

    /// Derivatives evaluated together, sharing one exponential.
    struct Taylor {
        double s, d1, d2, d3;
    };

    static Taylor expand(double t) {
        const double s = sigma(t);
        const double d1 = s * (1.0 - s);
        const double d2 = d1 * (1.0 - 2.0 * s);
        const double d3 = d2 * (1.0 - 2.0 * s) - 2.0 * d1 * d1;
        return {s, d1, d2, d3};
    }

    static double d1(double t) { return expand(t).d1; }
    static double d2(double t) { return expand(t).d2; }
    static double d3(double t) { return expand(t).d3; }
};

inline std::string_view to_string(ActivationKind) { return "sigmoid"; }

/// Spatial coordinate plus the region label z (-1 inside, +1 outside).
struct AugmentedPoint {
    Vector x;
    double z = 1.0;
};

/// Weights and biases of the shallow network.
///
/// Flattened layout (stable, indexed by the optimizer and the tests):
/// W1 row-major (N x (d+1)), then b1 (N), then W2 (N), then b2.
struct ShallowNetParams {
    int d = 1;
    int N = 1;
    Matrix W1;  // N x (d+1)
    Vector b1;  // N
    Vector W2;  // N
    double b2 = 0.0;

    ShallowNetParams() : ShallowNetParams(1, 1) {}

    ShallowNetParams(int dim, int neurons) : d(dim), N(neurons) {
        if (dim < 1 || neurons < 1) {
            throw std::invalid_argument("ShallowNetParams: need d >= 1 and N >= 1");
        }
        W1 = Matrix::Zero(N, d + 1);
        b1 = Vector::Zero(N);
        W2 = Vector::Zero(N);
    }

    static constexpr std::size_t count(int dim, int neurons) {
        return static_cast<std::size_t>(dim + 3) * static_cast<std::size_t>(neurons) + 1;
    }
    std::size_t size() const { return count(d, N); }

    // Column offsets into the flattened vector.
    std::size_t w1_index(int j, int i) const { return static_cast<std::size_t>(j) * (d + 1) + i; }
    std::size_t b1_index(int j) const { return static_cast<std::size_t>(N) * (d + 1) + j; }
    std::size_t w2_index(int j) const { return static_cast<std::size_t>(N) * (d + 2) + j; }
    std::size_t b2_index() const { return static_cast<std::size_t>(N) * (d + 3); }

    Vector flatten() const {
        Vector p(size());
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i <= d; ++i) p(w1_index(j, i)) = W1(j, i);
            p(b1_index(j)) = b1(j);
            p(w2_index(j)) = W2(j);
        }
        p(b2_index()) = b2;
        return p;
    }

    static ShallowNetParams unflatten(int dim, int neurons, const Vector& p) {
        ShallowNetParams out(dim, neurons);
        if (static_cast<std::size_t>(p.size()) != out.size()) {
            throw std::invalid_argument("unflatten: expected " + std::to_string(out.size()) +
                                        " parameters, got " + std::to_string(p.size()));
        }
        for (int j = 0; j < neurons; ++j) {
            for (int i = 0; i <= dim; ++i) out.W1(j, i) = p(out.w1_index(j, i));
            out.b1(j) = p(out.b1_index(j));
            out.W2(j) = p(out.w2_index(j));
        }
        out.b2 = p(out.b2_index());
        return out;
    }

    bool all_finite() const {
        return W1.allFinite() && b1.allFinite() && W2.allFinite() && std::isfinite(b2);
    }
};

namespace detail {

inline void check_dim(const ShallowNetParams& params, const Vector& x) {
    if (x.size() != params.d) {
        throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                    ", network expects " + std::to_string(params.d));
    }
}

inline Vector preactivation(const ShallowNetParams& params, const Vector& x, double z) {
    return params.W1.leftCols(params.d) * x + params.W1.col(params.d) * z + params.b1;
}

}  // namespace detail

inline double forward(const ShallowNetParams& params, const AugmentedPoint& pt) {
    detail::check_dim(params, pt.x);
    const Vector h = detail::preactivation(params, pt.x, pt.z);
    double out = params.b2;
    for (int j = 0; j < params.N; ++j) out += params.W2(j) * Activation::sigma(h(j));
    return out;
}

/// Gradient with respect to (x, z); the last entry is d/dz.
inline Vector spatial_gradient(const ShallowNetParams& params, const AugmentedPoint& pt) {
    detail::check_dim(params, pt.x);
    const Vector h = detail::preactivation(params, pt.x, pt.z);
    Vector weights(params.N);
    for (int j = 0; j < params.N; ++j) weights(j) = params.W2(j) * Activation::d1(h(j));
    return params.W1.transpose() * weights;
}

/// Laplacian over the d spatial coordinates only (z excluded).
inline double spatial_laplacian(const ShallowNetParams& params, const AugmentedPoint& pt) {
    detail::check_dim(params, pt.x);
    const Vector h = detail::preactivation(params, pt.x, pt.z);
    double out = 0.0;
    for (int j = 0; j < params.N; ++j) {
        out += params.W2(j) * Activation::d2(h(j)) * params.W1.row(j).head(params.d).squaredNorm();
    }
    return out;
}

/// grad_x phi_aug . n
inline double normal_derivative(const ShallowNetParams& params, const AugmentedPoint& pt,
                                const Vector& n) {
    if (n.size() != params.d) throw std::invalid_argument("normal has wrong dimension");
    return spatial_gradient(params, pt).head(params.d).dot(n);
}

enum class JacobianKind { value, laplacian, normal_derivative };

/// Writable view of one Jacobian row; rows of a column-major matrix are strided.
using JacobianRow = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

/// Writes d(quantity)/dp for one point into `row` (length N_p).
///
/// For normal_derivative, `n` must hold the d-vector to project on.
inline void param_jacobian_row(const ShallowNetParams& params, const AugmentedPoint& pt,
                               JacobianKind which, const Vector* n, JacobianRow row) {
    const int d = params.d;
    detail::check_dim(params, pt.x);
    if (static_cast<std::size_t>(row.size()) != params.size()) {
        throw std::invalid_argument("param_jacobian_row: row has wrong length");
    }
    Vector xi(d + 1);
    xi.head(d) = pt.x;
    xi(d) = pt.z;
    const Vector h = params.W1 * xi + params.b1;

    switch (which) {
        case JacobianKind::value:
            for (int j = 0; j < params.N; ++j) {
                const auto a = Activation::expand(h(j));
                const double c = params.W2(j) * a.d1;
                for (int i = 0; i <= d; ++i) row(params.w1_index(j, i)) = c * xi(i);
                row(params.b1_index(j)) = c;
                row(params.w2_index(j)) = a.s;
            }
            row(params.b2_index()) = 1.0;
            return;

        case JacobianKind::laplacian:
            for (int j = 0; j < params.N; ++j) {
                const auto a = Activation::expand(h(j));
                const double sq = params.W1.row(j).head(d).squaredNorm();
                const double w = params.W2(j);
                for (int i = 0; i <= d; ++i) {
                    double v = a.d3 * xi(i) * sq;
                    if (i < d) v += 2.0 * a.d2 * params.W1(j, i);
                    row(params.w1_index(j, i)) = w * v;
                }
                row(params.b1_index(j)) = w * a.d3 * sq;
                row(params.w2_index(j)) = a.d2 * sq;
            }
            row(params.b2_index()) = 0.0;
            return;

        case JacobianKind::normal_derivative: {
            if (n == nullptr || n->size() != d) {
                throw std::invalid_argument("normal_derivative Jacobian needs a normal of length d");
            }
            for (int j = 0; j < params.N; ++j) {
                const auto a = Activation::expand(h(j));
                const double proj = params.W1.row(j).head(d).dot(*n);
                const double w = params.W2(j);
                for (int i = 0; i <= d; ++i) {
                    double v = a.d2 * xi(i) * proj;
                    if (i < d) v += a.d1 * (*n)(i);
                    row(params.w1_index(j, i)) = w * v;
                }
                row(params.b1_index(j)) = w * a.d2 * proj;
                row(params.w2_index(j)) = a.d1 * proj;
            }
            row(params.b2_index()) = 0.0;
            return;
        }
    }
    throw std::invalid_argument("param_jacobian_row: unknown Jacobian kind");
}

/// Jacobian of the selected quantity over a batch of points (#pts x N_p).
/// `normals` is required (one per point) for JacobianKind::normal_derivative.
inline Matrix param_jacobian(const ShallowNetParams& params, std::span<const AugmentedPoint> pts,
                             JacobianKind which, std::span<const Vector> normals = {}) {
    if (which == JacobianKind::normal_derivative && normals.size() != pts.size()) {
        throw std::invalid_argument("param_jacobian: one normal per point required");
    }
    Matrix J(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(params.size()));
    parallel_for(pts.size(), [&](std::size_t i) {
        const Vector* n = which == JacobianKind::normal_derivative ? &normals[i] : nullptr;
        param_jacobian_row(params, pts[i], which, n, J.row(static_cast<Eigen::Index>(i)));
    });
    return J;
}

enum class InitScheme { uniform };

inline std::string_view to_string(InitScheme) { return "uniform"; }

inline InitScheme init_scheme_from_string(std::string_view s) {
    if (s == "uniform") return InitScheme::uniform;
    throw std::invalid_argument("unknown init scheme: " + std::string(s));
}

/// Draws every weight and bias i.i.d. uniform on [-1, 1], in flattened order.
inline ShallowNetParams init_params(int d, int N, std::uint64_t seed,
                                    InitScheme scheme = InitScheme::uniform) {
    ShallowNetParams shape(d, N);
    Vector p(shape.size());
    std::mt19937_64 rng(seed);
    switch (scheme) {
        case InitScheme::uniform: {
            std::uniform_real_distribution<double> unif(-1.0, 1.0);
            for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = unif(rng);
            break;
        }
    }
    return ShallowNetParams::unflatten(d, N, p);
}

}  // namespace dcsnn
