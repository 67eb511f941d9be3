#pragma once

// JSON records and plot-ready CSV for parameters, training reports,
// collocation sets and preset descriptions.

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcsnn/geometry.hpp"
#include "dcsnn/network.hpp"
#include "dcsnn/optimizer.hpp"
#include "dcsnn/presets.hpp"
#include "dcsnn/problems.hpp"

namespace dcsnn {

using nlohmann::json;

namespace detail {

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// JSON has no NaN/Inf; non-finite numbers are written as null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

// ---- network -------------------------------------------------------------

inline json params_to_json(const ShallowNetParams& p, InitScheme scheme = InitScheme::uniform) {
    return {{"d", p.d}, {"N", p.N}, {"scheme", std::string(to_string(scheme))}, {"flat", detail::to_std(p.flatten())}};
}

inline ShallowNetParams params_from_json(const json& j) {
    const int d = j.at("d").get<int>();
    const int N = j.at("N").get<int>();
    auto params = ShallowNetParams::unflatten(d, N, detail::to_eigen(j.at("flat").get<std::vector<double>>()));
    if (!params.all_finite()) throw std::invalid_argument("params_from_json: non-finite parameter");
    return params;
}

// ---- optimizer -----------------------------------------------------------

inline json lm_config_to_json(const LMConfig& c) {
    return {{"mu0", c.mu0},           {"mu_up", c.mu_up},         {"mu_down", c.mu_down},
            {"mu_min", c.mu_min},     {"mu_max", c.mu_max},       {"max_iters", c.max_iters},
            {"loss_tol", c.loss_tol}, {"stall_rejections", c.stall_rejections}};
}

/// Fields present in `j` override `base`.
inline LMConfig lm_config_from_json(const json& j, LMConfig base = {}) {
    base.mu0 = j.value("mu0", base.mu0);
    base.mu_up = j.value("mu_up", base.mu_up);
    base.mu_down = j.value("mu_down", base.mu_down);
    base.mu_min = j.value("mu_min", base.mu_min);
    base.mu_max = j.value("mu_max", base.mu_max);
    base.max_iters = j.value("max_iters", base.max_iters);
    base.loss_tol = j.value("loss_tol", base.loss_tol);
    base.stall_rejections = j.value("stall_rejections", base.stall_rejections);
    base.validate();
    return base;
}

inline json report_to_json(const TrainReport& r) {
    json losses = json::array(), mus = json::array();
    for (double v : r.loss_history) losses.push_back(detail::number(v));
    for (double v : r.mu_history) mus.push_back(detail::number(v));
    int accepted = 0;
    for (bool a : r.accepted) accepted += a ? 1 : 0;
    return {{"final_params", detail::to_std(r.final_params)},
            {"loss_history", losses},
            {"mu_history", mus},
            {"accepted_steps", accepted},
            {"iterations", r.iterations},
            {"final_loss", detail::number(r.final_loss())},
            {"stop_reason", std::string(to_string(r.stop_reason))},
            {"message", r.message}};
}

/// Two columns: iteration, loss.
inline void write_loss_history_csv(std::ostream& os, const TrainReport& r) {
    os << "iteration,loss\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < r.loss_history.size(); ++k) os << k << ',' << r.loss_history[k] << '\n';
}

// ---- geometry ------------------------------------------------------------

/// One row per point: role, x_1..x_d, z (interior only), n_1..n_d (interface only).
inline void write_collocation_csv(std::ostream& os, const CollocationSet& c, int d) {
    os << "role";
    for (int i = 0; i < d; ++i) os << ",x" << i + 1;
    os << ",z";
    for (int i = 0; i < d; ++i) os << ",n" << i + 1;
    os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    auto coords = [&](const Vector& x) {
        for (int i = 0; i < d; ++i) os << ',' << x(i);
    };
    auto blanks = [&] {
        for (int i = 0; i < d; ++i) os << ',';
    };
    for (const auto& p : c.interior) {
        os << "interior";
        coords(p.x);
        os << ',' << p.z;
        blanks();
        os << '\n';
    }
    for (const auto& x : c.boundary) {
        os << "boundary";
        coords(x);
        os << ',';
        blanks();
        os << '\n';
    }
    for (const auto& p : c.interface) {
        os << "interface";
        coords(p.x);
        os << ',';
        coords(p.n);
        os << '\n';
    }
}

inline void write_fit_dataset_csv(std::ostream& os, const std::vector<FitSample>& data) {
    if (data.empty()) return;
    const auto d = data.front().x.size();
    os << "role";
    for (Eigen::Index i = 0; i < d; ++i) os << ",x" << i + 1;
    os << ",z,target\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& s : data) {
        os << "fit";
        for (Eigen::Index i = 0; i < d; ++i) os << ',' << s.x(i);
        os << ',' << s.z << ',' << s.target << '\n';
    }
}

inline json curve_to_json(const PolarCurve& c) {
    return {{"base", c.base}, {"cos_amp", c.cos_amp}, {"sin_amp", c.sin_amp}, {"freq", c.freq}};
}

inline PolarCurve curve_from_json(const json& j) {
    return {j.at("base").get<double>(), j.value("cos_amp", 0.0), j.value("sin_amp", 0.0), j.value("freq", 0)};
}

inline json domain_to_json(const Domain& dom) {
    return std::visit(
        [](const auto& g) -> json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Hypercube>) {
                return {{"type", "hypercube"}, {"lo", detail::to_std(g.lo)}, {"hi", detail::to_std(g.hi)}};
            } else if constexpr (std::is_same_v<T, Ball>) {
                return {{"type", "ball"}, {"center", detail::to_std(g.center)}, {"radius", g.radius}};
            } else {
                return {{"type", "polar_star"}, {"rho", curve_to_json(g.curve)}};
            }
        },
        dom);
}

inline Domain domain_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "hypercube") {
        return Hypercube{detail::to_eigen(j.at("lo").get<std::vector<double>>()),
                         detail::to_eigen(j.at("hi").get<std::vector<double>>())};
    }
    if (type == "ball") {
        return Ball{detail::to_eigen(j.at("center").get<std::vector<double>>()), j.at("radius").get<double>()};
    }
    if (type == "polar_star") return PolarStarDomain{curve_from_json(j.at("rho"))};
    throw std::invalid_argument("unknown domain type: " + type);
}

inline json interface_to_json(const Interface& itf) {
    return std::visit(
        [](const auto& g) -> json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Ellipse>) {
                return {{"type", "ellipse"}, {"a", g.a}, {"b", g.b}};
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                return {{"type", "ellipsoid"}, {"a", g.a}, {"b", g.b}, {"c", g.c}};
            } else if constexpr (std::is_same_v<T, PolarStarInterface>) {
                return {{"type", "polar_star"}, {"rho", curve_to_json(g.curve)}};
            } else {
                return {{"type", "hypersphere"}, {"radius", g.radius}, {"d", g.d}};
            }
        },
        itf);
}

inline Interface interface_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "ellipse") return Ellipse{j.at("a").get<double>(), j.at("b").get<double>()};
    if (type == "ellipsoid") return Ellipsoid{j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()};
    if (type == "polar_star") return PolarStarInterface{curve_from_json(j.at("rho"))};
    if (type == "hypersphere") return Hypersphere{j.at("radius").get<double>(), j.at("d").get<int>()};
    throw std::invalid_argument("unknown interface type: " + type);
}

// ---- problems ------------------------------------------------------------

inline json error_report_to_json(const ErrorReport& e) {
    return {{"l_inf", detail::number(e.l_inf)},
            {"l2", detail::number(e.l2)},
            {"rel_l2", detail::number(e.rel_l2)},
            {"n_test", e.n_test},
            {"seed", e.seed}};
}

/// Self-contained problem description; preset_from_json inverts it.
inline json preset_to_json(const Preset& p) {
    return {{"name", p.name},
            {"kind", p.kind == PresetKind::fit ? "fit" : "interface"},
            {"d", p.dim()},
            {"domain", domain_to_json(p.geom.domain)},
            {"interface", interface_to_json(p.geom.interface)},
            {"exact", p.exact.name},
            {"beta_minus", p.beta_minus},
            {"beta_plus", p.beta_plus},
            {"alpha_b", p.alpha_b},
            {"alpha_gamma", p.alpha_gamma},
            {"M", p.M},
            {"M_b", p.M_b},
            {"M_gamma", p.M_gamma},
            {"neurons", p.neurons},
            {"default_dist", std::string(to_string(p.default_dist))},
            {"lm", lm_config_to_json(p.lm)},
            {"seeds", {{"init", p.init_seed}, {"sample", p.sample_seed}, {"test", p.test_seed}}}};
}

inline Preset preset_from_json(const json& j) {
    const auto kind = j.value("kind", std::string("interface")) == "fit" ? PresetKind::fit : PresetKind::interface;
    LevelSetGeometry geom{domain_from_json(j.at("domain")), interface_from_json(j.at("interface"))};
    Preset p(j.value("name", std::string("custom")), kind, geom, fields::by_name(j.at("exact").get<std::string>(), geom.dim()));
    p.beta_minus = j.value("beta_minus", p.beta_minus);
    p.beta_plus = j.value("beta_plus", p.beta_plus);
    p.alpha_b = j.value("alpha_b", p.alpha_b);
    p.alpha_gamma = j.value("alpha_gamma", p.alpha_gamma);
    p.M = j.at("M").get<std::size_t>();
    p.M_b = j.value("M_b", std::size_t{0});
    p.M_gamma = j.value("M_gamma", std::size_t{0});
    p.neurons = j.value("neurons", std::vector<int>{10});
    p.default_dist = node_kind_from_string(j.value("default_dist", std::string("random")));
    if (j.contains("lm")) p.lm = lm_config_from_json(j.at("lm"), p.lm);
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        p.init_seed = s.value("init", p.init_seed);
        p.sample_seed = s.value("sample", p.sample_seed);
        p.test_seed = s.value("test", p.test_seed);
    }
    return p;
}

}  // namespace dcsnn
