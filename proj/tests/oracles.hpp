#pragma once

// Independent reference computations used only by the tests. None of these
// call the closed-form derivative code they check.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "dcsnn/network.hpp"
#include "dcsnn/problems.hpp"

namespace oracle {

using dcsnn::Matrix;
using dcsnn::Vector;

/// Plain forward pass written from the definition.
inline double net(const dcsnn::ShallowNetParams& q, const Vector& x, double z) {
    double out = q.b2;
    for (int j = 0; j < q.N; ++j) {
        double h = q.b1(j) + q.W1(j, q.d) * z;
        for (int i = 0; i < q.d; ++i) h += q.W1(j, i) * x(i);
        out += q.W2(j) / (1.0 + std::exp(-h));
    }
    return out;
}

/// Fourth-order central difference of a scalar function of one variable.
inline double diff(const std::function<double(double)>& f, double t, double h) {
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}

inline Vector fd_gradient(const dcsnn::ShallowNetParams& q, const Vector& x, double z, double h = 1e-4) {
    Vector g(q.d + 1);
    for (int i = 0; i < q.d; ++i) {
        g(i) = diff(
            [&](double t) {
                Vector y = x;
                y(i) = t;
                return net(q, y, z);
            },
            x(i), h);
    }
    g(q.d) = diff([&](double t) { return net(q, x, t); }, z, h);
    return g;
}

/// Sum of second central differences along each spatial axis.
inline double fd_laplacian(const dcsnn::ShallowNetParams& q, const Vector& x, double z, double h = 1e-3) {
    double lap = 0.0;
    for (int i = 0; i < q.d; ++i) {
        auto f = [&](double t) {
            Vector y = x;
            y(i) += t;
            return net(q, y, z);
        };
        lap += (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
    }
    return lap;
}

/// Finite-difference Jacobian of a vector function of p.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& p, double h = 1e-6) {
    const Vector f0 = f(p);
    Matrix J(f0.size(), p.size());
    for (Eigen::Index c = 0; c < p.size(); ++c) {
        Vector a = p, b = p;
        a(c) += h;
        b(c) -= h;
        J.col(c) = (f(a) - f(b)) / (2 * h);
    }
    return J;
}

/// Dense (J^T J + mu I)^{-1} J^T r by Cholesky.
inline Vector normal_equation_step(const Matrix& J, const Vector& r, double mu) {
    const Matrix A = J.transpose() * J + mu * Matrix::Identity(J.cols(), J.cols());
    return A.llt().solve(J.transpose() * r);
}

/// Collocation loss summed term by term from its definition, with the
/// network derivatives taken by finite differences of `net`.
inline double collocation_loss(const dcsnn::ShallowNetParams& q, const dcsnn::InterfaceProblem& prob,
                               const dcsnn::CollocationSet& c, bool exact_derivatives = true) {
    auto lap = [&](const Vector& x, double z) {
        return exact_derivatives ? dcsnn::spatial_laplacian(q, {x, z}) : fd_laplacian(q, x, z);
    };
    auto dn = [&](const Vector& x, double z, const Vector& n) {
        return exact_derivatives ? dcsnn::normal_derivative(q, {x, z}, n) : fd_gradient(q, x, z).head(q.d).dot(n);
    };
    double interior = 0.0, boundary = 0.0, gamma = 0.0;
    for (const auto& s : c.interior) {
        const auto region = s.z < 0 ? dcsnn::Region::inside : dcsnn::Region::outside;
        interior += std::pow(lap(s.x, s.z) - prob.rhs(s.x, region), 2);
    }
    for (const auto& x : c.boundary) boundary += std::pow(net(q, x, 1.0) - prob.g(x), 2);
    for (const auto& s : c.interface) {
        gamma += std::pow(net(q, s.x, 1.0) - net(q, s.x, -1.0) - prob.v(s.x), 2);
        gamma += std::pow(prob.beta_plus * dn(s.x, 1.0, s.n) - prob.beta_minus * dn(s.x, -1.0, s.n) - prob.w(s.x, s.n), 2);
    }
    return interior / static_cast<double>(c.M()) + prob.alpha_b * boundary / static_cast<double>(c.M_b()) +
           prob.alpha_gamma * gamma / static_cast<double>(c.M_gamma());
}

/// Area enclosed by a polar curve, 1/2 integral of rho^2, by the midpoint rule.
inline double polar_area(const dcsnn::PolarCurve& c, int n = 100000) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / n;
        s += 0.5 * std::pow(c.rho(th), 2);
    }
    return s * 2.0 * std::numbers::pi / n;
}

}  // namespace oracle
