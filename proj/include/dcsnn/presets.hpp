#pragma once

// Shipped experiment configurations: a 1-D piecewise fit and five interface
// problems in 2, 3 and 6 dimensions.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcsnn/geometry.hpp"
#include "dcsnn/optimizer.hpp"
#include "dcsnn/problems.hpp"

namespace dcsnn {

enum class PresetKind { fit, interface };

/// Optimizer settings shared by the presets. Damping factors stay within
/// 1.5x per step; the loss tolerance is below what the iteration cap reaches.
inline LMConfig default_lm() {
    LMConfig c;
    c.mu0 = 1e3;
    c.mu_up = 1.5;
    c.mu_down = 2.0 / 3.0;
    c.loss_tol = 1e-13;
    c.max_iters = 5000;
    return c;
}

struct Preset {
    std::string name;
    PresetKind kind = PresetKind::interface;
    LevelSetGeometry geom;
    PiecewiseField exact;
    double beta_minus = 1.0;
    double beta_plus = 1e-3;
    double alpha_b = 1.0;
    double alpha_gamma = 1.0;
    std::size_t M = 0;
    std::size_t M_b = 0;
    std::size_t M_gamma = 0;
    std::vector<int> neurons;
    NodeKind default_dist = NodeKind::random;
    /// Optimizer settings used unless a run overrides them.
    LMConfig lm = default_lm();
    std::uint64_t init_seed = 1;
    std::uint64_t sample_seed = 2;
    std::uint64_t test_seed = 3;

    Preset(std::string name_, PresetKind kind_, LevelSetGeometry geom_, PiecewiseField exact_)
        : name(std::move(name_)), kind(kind_), geom(std::move(geom_)), exact(std::move(exact_)) {}

    int dim() const { return geom.dim(); }
    std::size_t param_count(int N) const { return ShallowNetParams::count(dim(), N); }
    std::size_t n_test() const { return 100 * M; }

    InterfaceProblem problem() const {
        if (kind != PresetKind::interface) throw std::logic_error("preset " + name + " is not an interface problem");
        return manufacture({geom, beta_minus, beta_plus, exact, alpha_b, alpha_gamma});
    }

    /// Interior, boundary and interface points; the three roles use the
    /// seeds seed, seed + 1 and seed + 2.
    CollocationSet collocation(NodeKind dist, std::uint64_t seed) const {
        if (kind != PresetKind::interface) throw std::logic_error("preset " + name + " has no collocation set");
        CollocationSet c;
        c.interior = sample_interior(geom, M, {dist}, seed);
        c.boundary = sample_boundary(geom, M_b, {dist}, seed + 1);
        c.interface = sample_interface(geom, M_gamma, seed + 2);
        return c;
    }

    /// Training data for the fit preset: the two domain end points plus
    /// M - 2 interior points, labeled by region and tagged with phi.
    std::vector<FitSample> fit_dataset(NodeKind dist, std::uint64_t seed) const {
        if (kind != PresetKind::fit) throw std::logic_error("preset " + name + " is not a fit problem");
        const auto& cube = std::get<Hypercube>(geom.domain);
        std::vector<FitSample> data;
        auto add = [&](const Vector& x) {
            const Region r = classify(geom, x);
            data.push_back({x, label(r), exact(x, r)});
        };
        add(cube.lo);
        add(cube.hi);
        for (auto& s : sample_interior(geom, M - 2, {dist}, seed)) add(s.x);
        return data;
    }
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fit1d", "ex1", "ex2", "ex3", "ex4", "ex5"};
    return names;
}

inline Preset preset(std::string_view name) {
    auto cube = [](int d, double lo, double hi) {
        return Hypercube{Vector::Constant(d, lo), Vector::Constant(d, hi)};
    };

    if (name == "fit1d") {
        // Inner region [0, 1/2] is the part of [0, 1] within distance 1/2 of the origin.
        Preset p("fit1d", PresetKind::fit, {cube(1, 0.0, 1.0), Hypersphere{0.5, 1}}, fields::sin_cos_2pi());
        p.M = 100;
        p.neurons = {5};
        p.lm.loss_tol = 1e-12;
        p.lm.max_iters = 20000;
        p.init_seed = 1;
        p.sample_seed = 12;
        p.test_seed = 13;
        return p;
    }
    if (name == "ex1") {
        Preset p("ex1", PresetKind::interface, {cube(2, -1.0, 1.0), Ellipse{0.2, 0.5}}, fields::exp_sin(2));
        p.M = 64;
        p.M_b = 32;
        p.M_gamma = 32;
        p.neurons = {10, 20};
        p.default_dist = NodeKind::chebyshev;
        p.init_seed = 7;
        p.sample_seed = 100;
        p.test_seed = 200;
        return p;
    }
    if (name == "ex2") {
        Preset p("ex2", PresetKind::interface, {cube(2, -1.0, 1.0), PolarStarInterface{{0.5, 0.0, 1.0 / 7.0, 5}}},
                 fields::radial_pair());
        p.beta_minus = 10.0;
        p.beta_plus = 1.0;
        p.M = 400;
        p.M_b = 80;
        p.M_gamma = 80;
        p.neurons = {50, 100};
        p.default_dist = NodeKind::random;
        p.lm.max_iters = 3000;
        p.init_seed = 21;
        p.sample_seed = 22;
        p.test_seed = 23;
        return p;
    }
    if (name == "ex3") {
        Preset p("ex3", PresetKind::interface,
                 {PolarStarDomain{{1.0, -0.3, 0.0, 5}}, PolarStarInterface{{0.4, -0.2, 0.0, 5}}}, fields::exp_sin(2));
        p.M = 64;
        p.M_b = 32;
        p.M_gamma = 32;
        p.neurons = {20};
        p.default_dist = NodeKind::random;
        p.init_seed = 31;
        p.sample_seed = 32;
        p.test_seed = 33;
        return p;
    }
    if (name == "ex4") {
        Preset p("ex4", PresetKind::interface, {cube(3, -1.0, 1.0), Ellipsoid{0.7, 0.5, 0.3}}, fields::exp_sin(3));
        p.M = 216;
        p.M_b = 216;
        p.M_gamma = 108;
        p.neurons = {20, 30};
        p.default_dist = NodeKind::chebyshev;
        p.init_seed = 41;
        p.sample_seed = 42;
        p.test_seed = 43;
        return p;
    }
    if (name == "ex5") {
        Preset p("ex5", PresetKind::interface, {Ball{Vector::Zero(6), 0.6}, Hypersphere{0.5, 6}}, fields::exp_sin(6));
        p.M = 100;
        p.M_b = 141;
        p.M_gamma = 141;
        p.neurons = {10, 30, 50};
        p.default_dist = NodeKind::random;
        p.init_seed = 51;
        p.sample_seed = 52;
        p.test_seed = 53;
        return p;
    }
    throw std::invalid_argument("unknown preset: " + std::string(name));
}

}  // namespace dcsnn
