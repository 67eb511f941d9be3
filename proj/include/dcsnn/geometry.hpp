#pragma once

// Domains, interfaces and collocation sampling.
//
// Every interface carries a level-set function psi with psi < 0 in the
// inner region (label z = -1), psi > 0 outside (z = +1) and psi = 0 on the
// interface. Points with psi == 0 are labeled inside.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dcsnn {

using Vector = Eigen::VectorXd;

/// rho(theta) = base + cos_amp cos(k theta) + sin_amp sin(k theta).
struct PolarCurve {
    double base = 1.0;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
    int freq = 0;

    double rho(double theta) const {
        return base + cos_amp * std::cos(freq * theta) + sin_amp * std::sin(freq * theta);
    }
    double drho(double theta) const {
        return freq * (-cos_amp * std::sin(freq * theta) + sin_amp * std::cos(freq * theta));
    }
    double max_rho() const { return base + std::hypot(cos_amp, sin_amp); }
    double min_rho() const { return base - std::hypot(cos_amp, sin_amp); }

    Vector point(double theta) const {
        const double r = rho(theta);
        return Vector{{r * std::cos(theta), r * std::sin(theta)}};
    }

    /// psi = |x| - rho(atan2(x2, x1)).
    double level(const Vector& x) const { return x.norm() - rho(std::atan2(x(1), x(0))); }

    /// grad psi = r_hat - rho'(theta) / r * theta_hat.
    Vector level_gradient(const Vector& x) const {
        const double r = x.norm();
        if (r == 0.0) throw std::invalid_argument("PolarCurve: gradient undefined at the origin");
        const double theta = std::atan2(x(1), x(0));
        const double c = std::cos(theta), s = std::sin(theta);
        const double k = drho(theta) / r;
        return Vector{{c + k * s, s - k * c}};
    }
};

// Domain families.
struct Hypercube {
    Vector lo, hi;
};
struct Ball {
    Vector center;
    double radius = 1.0;
};
struct PolarStarDomain {
    PolarCurve curve;
};
using Domain = std::variant<Hypercube, Ball, PolarStarDomain>;

// Interface families, all centered at the origin.
struct Ellipse {
    double a = 1.0, b = 1.0;
};
struct Ellipsoid {
    double a = 1.0, b = 1.0, c = 1.0;
};
struct PolarStarInterface {
    PolarCurve curve;
};
struct Hypersphere {
    double radius = 1.0;
    int d = 2;
};
using Interface = std::variant<Ellipse, Ellipsoid, PolarStarInterface, Hypersphere>;

enum class Region : int { inside = -1, outside = 1 };

inline double label(Region r) { return static_cast<double>(static_cast<int>(r)); }

inline int domain_dim(const Domain& dom) {
    return std::visit(
        [](const auto& g) -> int {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Hypercube>) return static_cast<int>(g.lo.size());
            else if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(g.center.size());
            else return 2;
        },
        dom);
}

inline int interface_dim(const Interface& itf) {
    return std::visit(
        [](const auto& g) -> int {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>) return 2;
            else if constexpr (std::is_same_v<T, Ellipsoid>) return 3;
            else if constexpr (std::is_same_v<T, PolarStarInterface>) return 2;
            else return g.d;
        },
        itf);
}

inline double level_set(const Interface& itf, const Vector& x) {
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>) {
                return std::pow(x(0) / g.a, 2) + std::pow(x(1) / g.b, 2) - 1.0;
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                return std::pow(x(0) / g.a, 2) + std::pow(x(1) / g.b, 2) + std::pow(x(2) / g.c, 2) - 1.0;
            } else if constexpr (std::is_same_v<T, PolarStarInterface>) {
                return g.curve.level(x);
            } else {
                return x.norm() - g.radius;
            }
        },
        itf);
}

inline Vector level_set_gradient(const Interface& itf, const Vector& x) {
    return std::visit(
        [&](const auto& g) -> Vector {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>) {
                return Vector{{2.0 * x(0) / (g.a * g.a), 2.0 * x(1) / (g.b * g.b)}};
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                return Vector{{2.0 * x(0) / (g.a * g.a), 2.0 * x(1) / (g.b * g.b), 2.0 * x(2) / (g.c * g.c)}};
            } else if constexpr (std::is_same_v<T, PolarStarInterface>) {
                return g.curve.level_gradient(x);
            } else {
                const double r = x.norm();
                if (r == 0.0) throw std::invalid_argument("Hypersphere: gradient undefined at the origin");
                return x / r;
            }
        },
        itf);
}

/// Unit normal grad psi / |grad psi|, pointing from the inner region outward.
inline Vector interface_normal(const Interface& itf, const Vector& x) {
    const Vector g = level_set_gradient(itf, x);
    return g / g.norm();
}

struct LevelSetGeometry {
    Domain domain;
    Interface interface;

    int dim() const { return domain_dim(domain); }

    LevelSetGeometry(Domain dom, Interface itf) : domain(std::move(dom)), interface(std::move(itf)) {
        if (domain_dim(domain) != interface_dim(interface)) {
            throw std::invalid_argument("LevelSetGeometry: domain and interface dimensions differ");
        }
    }

    double psi(const Vector& x) const { return level_set(interface, x); }

    /// True when x lies in the closed domain, up to tol.
    bool contains(const Vector& x, double tol = 1e-12) const {
        if (x.size() != dim()) throw std::invalid_argument("point has wrong dimension");
        return std::visit(
            [&](const auto& g) -> bool {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Hypercube>) {
                    return ((x - g.lo).array() >= -tol).all() && ((g.hi - x).array() >= -tol).all();
                } else if constexpr (std::is_same_v<T, Ball>) {
                    return (x - g.center).norm() <= g.radius + tol;
                } else {
                    return x.norm() <= g.curve.rho(std::atan2(x(1), x(0))) + tol;
                }
            },
            domain);
    }

    /// Distance-like residual of the boundary equation; zero on the boundary.
    double boundary_residual(const Vector& x) const {
        return std::visit(
            [&](const auto& g) -> double {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Hypercube>) {
                    double best = std::numeric_limits<double>::infinity();
                    for (Eigen::Index i = 0; i < x.size(); ++i) {
                        best = std::min({best, std::abs(x(i) - g.lo(i)), std::abs(x(i) - g.hi(i))});
                    }
                    return contains(x) ? best : std::numeric_limits<double>::infinity();
                } else if constexpr (std::is_same_v<T, Ball>) {
                    return std::abs((x - g.center).norm() - g.radius);
                } else {
                    return std::abs(x.norm() - g.curve.rho(std::atan2(x(1), x(0))));
                }
            },
            domain);
    }

    /// Axis-aligned box enclosing the domain.
    std::pair<Vector, Vector> bounding_box() const {
        return std::visit(
            [&](const auto& g) -> std::pair<Vector, Vector> {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Hypercube>) {
                    return {g.lo, g.hi};
                } else if constexpr (std::is_same_v<T, Ball>) {
                    const Vector r = Vector::Constant(g.center.size(), g.radius);
                    return {g.center - r, g.center + r};
                } else {
                    const double r = g.curve.max_rho();
                    return {Vector::Constant(2, -r), Vector::Constant(2, r)};
                }
            },
            domain);
    }
};

/// Region of x: inside when psi(x) <= 0. Throws for points outside the domain.
inline Region classify(const LevelSetGeometry& geom, const Vector& x) {
    if (!geom.contains(x)) throw std::invalid_argument("classify: point lies outside the domain");
    return geom.psi(x) <= 0.0 ? Region::inside : Region::outside;
}

enum class NodeKind { chebyshev, uniform, random };

struct NodeDistribution {
    NodeKind kind = NodeKind::random;
    bool is_grid() const { return kind != NodeKind::random; }
};

inline std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::chebyshev: return "chebyshev";
        case NodeKind::uniform: return "uniform";
        case NodeKind::random: return "random";
    }
    return "unknown";
}

inline NodeKind node_kind_from_string(std::string_view s) {
    if (s == "chebyshev") return NodeKind::chebyshev;
    if (s == "uniform") return NodeKind::uniform;
    if (s == "random") return NodeKind::random;
    throw std::invalid_argument("unknown node distribution: " + std::string(s));
}

/// First-kind Chebyshev nodes mapped to [lo, hi], increasing. On [-1, 1] the
/// set is exactly antisymmetric (the odd-m middle node is exactly 0).
inline std::vector<double> chebyshev_nodes(int m, double lo, double hi) {
    if (m < 1) throw std::invalid_argument("chebyshev_nodes: m must be positive");
    if (!(lo < hi)) throw std::invalid_argument("chebyshev_nodes: need lo < hi");
    std::vector<double> t(m);
    for (int k = 1; k <= m / 2; ++k) {
        const double c = std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * m));
        t[m - k] = c;
        t[k - 1] = -c;
    }
    if (m % 2 == 1) t[m / 2] = 0.0;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (auto& v : t) v = mid + half * v;
    return t;
}

/// Cell midpoints lo + (k - 1/2)(hi - lo)/m, k = 1..m.
inline std::vector<double> uniform_nodes(int m, double lo, double hi) {
    if (m < 1) throw std::invalid_argument("uniform_nodes: m must be positive");
    std::vector<double> t(m);
    for (int k = 0; k < m; ++k) t[k] = lo + (k + 0.5) * (hi - lo) / m;
    return t;
}

inline std::vector<double> grid_nodes(NodeKind kind, int m, double lo, double hi) {
    return kind == NodeKind::chebyshev ? chebyshev_nodes(m, lo, hi) : uniform_nodes(m, lo, hi);
}

struct InteriorSample {
    Vector x;
    double z = 1.0;
};

struct InterfaceSample {
    Vector x;
    Vector n;
};

struct CollocationSet {
    std::vector<InteriorSample> interior;
    std::vector<Vector> boundary;
    std::vector<InterfaceSample> interface;

    std::size_t M() const { return interior.size(); }
    std::size_t M_b() const { return boundary.size(); }
    std::size_t M_gamma() const { return interface.size(); }
};

namespace detail {

/// Integer m with m^d == M, if any.
inline std::optional<int> exact_root(std::size_t M, int d) {
    if (d == 1) return static_cast<int>(M);
    const int guess = static_cast<int>(std::llround(std::pow(static_cast<double>(M), 1.0 / d)));
    for (int m = std::max(1, guess - 1); m <= guess + 1; ++m) {
        std::size_t p = 1;
        for (int i = 0; i < d; ++i) p *= static_cast<std::size_t>(m);
        if (p == M) return m;
    }
    return std::nullopt;
}

/// Tensor product of per-axis nodes; axis 0 varies fastest.
inline std::vector<Vector> tensor_grid(const std::vector<std::vector<double>>& axes) {
    const int d = static_cast<int>(axes.size());
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.size();
    std::vector<Vector> out;
    out.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
        Vector x(d);
        for (int i = 0; i < d; ++i) x(i) = axes[i][idx[i]];
        out.push_back(std::move(x));
        for (int i = 0; i < d; ++i) {
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

inline Vector random_unit_vector(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector g(d);
    do {
        for (int i = 0; i < d; ++i) g(i) = gauss(rng);
    } while (g.norm() == 0.0);
    return g / g.norm();
}

}  // namespace detail

/// Uniform draws over the domain by rejection from its bounding box.
/// Counts proposals so acceptance rates can be audited.
class RejectionSampler {
public:
    explicit RejectionSampler(const LevelSetGeometry& geom) : geom_(&geom) {
        std::tie(lo_, hi_) = geom.bounding_box();
    }

    Vector draw(std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int d = static_cast<int>(lo_.size());
        const bool box = std::holds_alternative<Hypercube>(geom_->domain);
        for (;;) {
            Vector x(d);
            for (int i = 0; i < d; ++i) x(i) = lo_(i) + (hi_(i) - lo_(i)) * unit(rng);
            ++proposals_;
            if (box || geom_->contains(x, 0.0)) {
                ++accepted_;
                return x;
            }
        }
    }

    std::uint64_t proposals() const { return proposals_; }
    std::uint64_t accepted() const { return accepted_; }

private:
    const LevelSetGeometry* geom_;
    Vector lo_, hi_;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
};

/// Interior collocation points with their region labels.
///
/// Grid distributions need a hypercube domain and M = m^d; random points are
/// i.i.d. uniform over the domain.
inline std::vector<InteriorSample> sample_interior(const LevelSetGeometry& geom, std::size_t M,
                                                   NodeDistribution dist, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("sample_interior: M must be positive");
    const int d = geom.dim();
    std::vector<Vector> xs;
    if (dist.is_grid()) {
        const auto* cube = std::get_if<Hypercube>(&geom.domain);
        if (cube == nullptr) {
            throw std::invalid_argument("sample_interior: grid distributions need a hypercube domain");
        }
        const auto m = detail::exact_root(M, d);
        if (!m) {
            throw std::invalid_argument("sample_interior: M = " + std::to_string(M) + " is not a " +
                                        std::to_string(d) + "-th power");
        }
        std::vector<std::vector<double>> axes;
        for (int i = 0; i < d; ++i) axes.push_back(grid_nodes(dist.kind, *m, cube->lo(i), cube->hi(i)));
        xs = detail::tensor_grid(axes);
    } else {
        std::mt19937_64 rng(seed);
        RejectionSampler sampler(geom);
        xs.reserve(M);
        for (std::size_t k = 0; k < M; ++k) xs.push_back(sampler.draw(rng));
    }
    std::vector<InteriorSample> out;
    out.reserve(xs.size());
    for (auto& x : xs) {
        const double z = label(classify(geom, x));
        out.push_back({std::move(x), z});
    }
    return out;
}

/// Points on the domain boundary.
///
/// Hypercube: M_b / (2d) points per face (grid distributions require exact
/// divisibility and a (d-1)-th power per face). Ball: uniform on the sphere,
/// or equispaced angles in 2-D for grid distributions. Polar star:
/// equispaced or uniform-random angles mapped through rho.
inline std::vector<Vector> sample_boundary(const LevelSetGeometry& geom, std::size_t M_b,
                                           NodeDistribution dist, std::uint64_t seed) {
    if (M_b < 1) throw std::invalid_argument("sample_boundary: M_b must be positive");
    const int d = geom.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(M_b);

    auto angles = [&](std::size_t count) {
        std::vector<double> th(count);
        for (std::size_t k = 0; k < count; ++k) {
            th[k] = dist.is_grid() ? 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count)
                                   : 2.0 * std::numbers::pi * unit(rng);
        }
        return th;
    };

    if (const auto* cube = std::get_if<Hypercube>(&geom.domain)) {
        const std::size_t faces = 2 * static_cast<std::size_t>(d);
        if (dist.is_grid() && M_b % faces != 0) {
            throw std::invalid_argument("sample_boundary: M_b = " + std::to_string(M_b) +
                                        " is not divisible by the face count " + std::to_string(faces));
        }
        for (std::size_t f = 0; f < faces; ++f) {
            const int axis = static_cast<int>(f / 2);
            const double fixed = f % 2 == 0 ? cube->lo(axis) : cube->hi(axis);
            const std::size_t count = M_b / faces + (f < M_b % faces ? 1 : 0);
            if (d == 1) {
                for (std::size_t k = 0; k < count; ++k) out.push_back(Vector::Constant(1, fixed));
                continue;
            }
            if (dist.is_grid()) {
                const auto m = detail::exact_root(count, d - 1);
                if (!m) {
                    throw std::invalid_argument("sample_boundary: per-face count " + std::to_string(count) +
                                                " is not a " + std::to_string(d - 1) + "-th power");
                }
                std::vector<std::vector<double>> axes;
                for (int i = 0; i < d; ++i) {
                    if (i == axis) axes.push_back({fixed});
                    else axes.push_back(grid_nodes(dist.kind, *m, cube->lo(i), cube->hi(i)));
                }
                for (auto& x : detail::tensor_grid(axes)) out.push_back(std::move(x));
            } else {
                for (std::size_t k = 0; k < count; ++k) {
                    Vector x(d);
                    for (int i = 0; i < d; ++i) {
                        x(i) = i == axis ? fixed : cube->lo(i) + (cube->hi(i) - cube->lo(i)) * unit(rng);
                    }
                    out.push_back(std::move(x));
                }
            }
        }
    } else if (const auto* ball = std::get_if<Ball>(&geom.domain)) {
        if (dist.is_grid()) {
            if (d != 2) throw std::invalid_argument("sample_boundary: grid distributions on a ball need d = 2");
            for (double th : angles(M_b)) {
                out.push_back(ball->center + ball->radius * Vector{{std::cos(th), std::sin(th)}});
            }
        } else {
            for (std::size_t k = 0; k < M_b; ++k) {
                out.push_back(ball->center + ball->radius * detail::random_unit_vector(d, rng));
            }
        }
    } else {
        const auto& star = std::get<PolarStarDomain>(geom.domain);
        for (double th : angles(M_b)) out.push_back(star.curve.point(th));
    }
    return out;
}

/// Random points on the interface with unit normals oriented inside -> outside.
/// Curves are sampled uniformly in the parameter angle (not arclength);
/// the ellipsoid maps uniform-on-sphere directions through its semi-axes.
inline std::vector<InterfaceSample> sample_interface(const LevelSetGeometry& geom, std::size_t M_gamma,
                                                     std::uint64_t seed) {
    if (M_gamma < 1) throw std::invalid_argument("sample_interface: M_gamma must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<InterfaceSample> out;
    out.reserve(M_gamma);
    for (std::size_t k = 0; k < M_gamma; ++k) {
        Vector x = std::visit(
            [&](const auto& g) -> Vector {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Ellipse>) {
                    const double th = angle(rng);
                    return Vector{{g.a * std::cos(th), g.b * std::sin(th)}};
                } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                    const Vector u = detail::random_unit_vector(3, rng);
                    return Vector{{g.a * u(0), g.b * u(1), g.c * u(2)}};
                } else if constexpr (std::is_same_v<T, PolarStarInterface>) {
                    return g.curve.point(angle(rng));
                } else {
                    return g.radius * detail::random_unit_vector(g.d, rng);
                }
            },
            geom.interface);
        Vector n = interface_normal(geom.interface, x);
        out.push_back({std::move(x), std::move(n)});
    }
    return out;
}

}  // namespace dcsnn
