#pragma once

// Self-checks run by `dcsnn validate`: analytic derivatives against finite
// differences, the SVD step against a dense normal-equation solve, and the
// structural invariants of every shipped preset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcsnn/geometry.hpp"
#include "dcsnn/network.hpp"
#include "dcsnn/optimizer.hpp"
#include "dcsnn/presets.hpp"
#include "dcsnn/problems.hpp"

namespace dcsnn {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

inline AugmentedPoint random_point(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(d);
    for (int i = 0; i < d; ++i) x(i) = u(rng);
    return {x, u(rng) < 0.0 ? -1.0 : 1.0};
}

}  // namespace detail

inline CheckResult check_param_count(std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dd(1, 8), nn(1, 64);
    for (int k = 0; k < 20; ++k) {
        const int d = dd(rng), N = nn(rng);
        if (static_cast<std::size_t>(init_params(d, N, rng()).flatten().size()) !=
            static_cast<std::size_t>((d + 3) * N + 1)) {
            return {"param_count", false, "d=" + std::to_string(d) + " N=" + std::to_string(N)};
        }
    }
    return {"param_count", true, "20 random (d, N)"};
}

inline CheckResult check_spatial_derivatives(int draws = 100, std::uint64_t seed = 2) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dd(1, 6), nn(1, 12);
    double worst_g = 0.0, worst_l = 0.0;
    for (int k = 0; k < draws; ++k) {
        const int d = dd(rng);
        const auto params = init_params(d, nn(rng), rng());
        const auto pt = detail::random_point(d, rng);
        const Vector g = spatial_gradient(params, pt);
        const double lap = spatial_laplacian(params, pt);
        double lap_fd = 0.0;
        for (int i = 0; i <= d; ++i) {
            auto a = pt, b = pt;
            if (i < d) {
                a.x(i) += 1e-6;
                b.x(i) -= 1e-6;
            } else {
                a.z += 1e-6;
                b.z -= 1e-6;
            }
            worst_g = std::max(worst_g, detail::rel_err(g(i), (forward(params, a) - forward(params, b)) / 2e-6));
            if (i < d) {
                auto c = pt, e = pt;
                c.x(i) += 1e-4;
                e.x(i) -= 1e-4;
                lap_fd += (forward(params, c) - 2.0 * forward(params, pt) + forward(params, e)) / 1e-8;
            }
        }
        worst_l = std::max(worst_l, detail::rel_err(lap, lap_fd));
    }
    const bool ok = worst_g < 1e-6 && worst_l < 1e-5;
    return {"spatial_derivatives", ok, "gradient " + detail::sci(worst_g) + ", laplacian " + detail::sci(worst_l)};
}

inline CheckResult check_param_jacobians(int draws = 20, std::uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dd(1, 4), nn(1, 8);
    double worst = 0.0;
    for (int k = 0; k < draws; ++k) {
        const int d = dd(rng), N = nn(rng);
        const auto params = init_params(d, N, rng());
        const Vector p = params.flatten();
        const auto pt = detail::random_point(d, rng);
        Vector n = detail::random_point(d, rng).x;
        n.normalize();
        auto quantity = [&](JacobianKind which, const ShallowNetParams& q) {
            switch (which) {
                case JacobianKind::value: return forward(q, pt);
                case JacobianKind::laplacian: return spatial_laplacian(q, pt);
                case JacobianKind::normal_derivative: return normal_derivative(q, pt, n);
            }
            return 0.0;
        };
        for (auto which : {JacobianKind::value, JacobianKind::laplacian, JacobianKind::normal_derivative}) {
            Eigen::RowVectorXd row(p.size());
            param_jacobian_row(params, pt, which, &n, row);
            for (Eigen::Index c = 0; c < p.size(); ++c) {
                Vector a = p, b = p;
                a(c) += 1e-6;
                b(c) -= 1e-6;
                const double fd = (quantity(which, ShallowNetParams::unflatten(d, N, a)) -
                                   quantity(which, ShallowNetParams::unflatten(d, N, b))) / 2e-6;
                worst = std::max(worst, detail::rel_err(row(c), fd));
            }
        }
    }
    return {"param_jacobians", worst < 1e-5, "max error " + detail::sci(worst)};
}

inline CheckResult check_lm_step(int draws = 20, std::uint64_t seed = 4) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < draws; ++k) {
        const Matrix J = Matrix::NullaryExpr(12, 7, [&] { return std::normal_distribution<double>()(rng); });
        const Vector r = Vector::NullaryExpr(12, [&] { return std::normal_distribution<double>()(rng); });
        const double mu = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
        const Matrix A = J.transpose() * J + mu * Matrix::Identity(7, 7);
        const Vector dense = A.ldlt().solve(J.transpose() * r);
        worst = std::max(worst, (lm_step(J, r, mu) - dense).norm() / dense.norm());
    }
    return {"lm_step_normal_equations", worst < 1e-10, "max relative error " + detail::sci(worst)};
}

/// Labels, boundary residuals, interface residuals and normal orientation.
inline CheckResult check_collocation(const Preset& p) {
    const std::string name = "collocation_" + p.name;
    if (p.kind != PresetKind::interface) {
        for (const auto& s : p.fit_dataset(p.default_dist, p.sample_seed)) {
            if (s.z != label(classify(p.geom, s.x))) return {name, false, "mislabeled fit point"};
        }
        return {name, true, "fit labels consistent"};
    }
    const auto c = p.collocation(p.default_dist, p.sample_seed);
    for (const auto& s : c.interior) {
        if (s.z != label(classify(p.geom, s.x))) return {name, false, "mislabeled interior point"};
    }
    for (const auto& x : c.boundary) {
        if (p.geom.boundary_residual(x) > 1e-12) return {name, false, "boundary residual " + detail::sci(p.geom.boundary_residual(x))};
    }
    for (const auto& s : c.interface) {
        if (std::abs(p.geom.psi(s.x)) > 1e-10) return {name, false, "interface residual"};
        if (std::abs(s.n.norm() - 1.0) > 1e-12) return {name, false, "normal not unit"};
        if (!(p.geom.psi(s.x + 1e-6 * s.n) > 0.0)) return {name, false, "normal points inward"};
        if (!p.geom.contains(s.x)) return {name, false, "interface point outside domain"};
    }
    return {name, true, std::to_string(c.M()) + "/" + std::to_string(c.M_b()) + "/" + std::to_string(c.M_gamma()) + " points"};
}

/// The exact solution must zero every residual block.
inline CheckResult check_manufactured(const Preset& p) {
    const std::string name = "manufactured_" + p.name;
    if (p.kind != PresetKind::interface) return {name, true, "not an interface problem"};
    const auto prob = p.problem();
    const auto c = p.collocation(p.default_dist, p.sample_seed);
    const double worst = pde_residuals(ExactField{*prob.exact}, prob, c).cwiseAbs().maxCoeff();
    return {name, worst < 1e-10, "max residual " + detail::sci(worst)};
}

/// |pde_residuals|^2 against the four loss terms summed independently.
inline CheckResult check_loss_decomposition(const Preset& p, std::uint64_t seed = 5) {
    const std::string name = "loss_decomposition_" + p.name;
    if (p.kind != PresetKind::interface) return {name, true, "not an interface problem"};
    const auto prob = p.problem();
    const auto c = p.collocation(p.default_dist, p.sample_seed);
    const auto params = init_params(p.dim(), p.neurons.front(), seed);
    const NetworkField phi{params};
    double interior = 0.0, boundary = 0.0, jump = 0.0, flux = 0.0;
    for (const auto& s : c.interior) {
        interior += std::pow(phi.laplacian(s.x, s.z) - prob.rhs(s.x, s.z < 0 ? Region::inside : Region::outside), 2);
    }
    for (const auto& x : c.boundary) boundary += std::pow(phi.value(x, 1.0) - prob.g(x), 2);
    for (const auto& [x, n] : c.interface) {
        jump += std::pow(phi.value(x, 1.0) - phi.value(x, -1.0) - prob.v(x), 2);
        flux += std::pow(prob.beta_plus * normal_derivative(params, {x, 1.0}, n) -
                             prob.beta_minus * normal_derivative(params, {x, -1.0}, n) - prob.w(x, n),
                         2);
    }
    const double loss = interior / c.M() + prob.alpha_b * boundary / c.M_b() +
                        prob.alpha_gamma * (jump + flux) / c.M_gamma();
    const double err = std::abs(pde_residuals(phi, prob, c).squaredNorm() - loss) / loss;
    return {name, err < 1e-12, "relative error " + detail::sci(err)};
}

inline std::vector<CheckResult> run_validation() {
    std::vector<CheckResult> out{check_param_count(), check_spatial_derivatives(), check_param_jacobians(),
                                 check_lm_step()};
    for (const auto& name : preset_names()) {
        const auto p = preset(name);
        out.push_back(check_collocation(p));
        out.push_back(check_manufactured(p));
        out.push_back(check_loss_decomposition(p));
    }
    return out;
}

}  // namespace dcsnn
