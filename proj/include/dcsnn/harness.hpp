#pragma once

// End-to-end runs: sample, initialize, train, evaluate and write records.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcsnn/io.hpp"
#include "dcsnn/presets.hpp"
#include "dcsnn/problems.hpp"

#ifndef DCSNN_VERSION
#define DCSNN_VERSION "0.1.0"
#endif

namespace dcsnn {

struct RunConfig {
    std::string preset = "ex1";
    /// Full problem description (preset_to_json schema); replaces `preset`.
    std::optional<json> problem;
    /// 0 selects the preset's first network size.
    int neurons = 0;
    std::optional<NodeKind> dist;
    std::optional<std::uint64_t> init_seed;
    std::optional<std::uint64_t> sample_seed;
    std::optional<std::uint64_t> test_seed;
    /// LMConfig fields overriding the preset's optimizer settings.
    json lm = json::object();
    /// Empty: nothing is written.
    std::string out_dir;
    /// Testing-error sampling period in iterations; 0 disables the history.
    int error_every = 10;
};

inline json run_config_to_json(const RunConfig& c) {
    json j{{"preset", c.preset}, {"neurons", c.neurons}, {"lm", c.lm}, {"error_every", c.error_every}};
    if (c.problem) j["problem"] = *c.problem;
    if (c.dist) j["dist"] = std::string(to_string(*c.dist));
    if (c.init_seed) j["init_seed"] = *c.init_seed;
    if (c.sample_seed) j["sample_seed"] = *c.sample_seed;
    if (c.test_seed) j["test_seed"] = *c.test_seed;
    if (!c.out_dir.empty()) j["out"] = c.out_dir;
    return j;
}

/// Fields present in `j` override `base`.
inline RunConfig run_config_from_json(const json& j, RunConfig base = {}) {
    base.preset = j.value("preset", base.preset);
    if (j.contains("problem")) base.problem = j.at("problem");
    base.neurons = j.value("neurons", base.neurons);
    if (j.contains("dist")) base.dist = node_kind_from_string(j.at("dist").get<std::string>());
    if (j.contains("init_seed")) base.init_seed = j.at("init_seed").get<std::uint64_t>();
    if (j.contains("sample_seed")) base.sample_seed = j.at("sample_seed").get<std::uint64_t>();
    if (j.contains("test_seed")) base.test_seed = j.at("test_seed").get<std::uint64_t>();
    if (j.contains("lm")) base.lm.update(j.at("lm"));
    base.out_dir = j.value("out", base.out_dir);
    base.error_every = j.value("error_every", base.error_every);
    return base;
}

enum class RunStatus { ok, stalled, failed };

inline std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::stalled: return "stalled";
        case RunStatus::failed: return "failed";
    }
    return "unknown";
}

struct RunRecord {
    json config;
    std::string preset;
    int N = 0;
    std::size_t N_p = 0;
    NodeKind dist = NodeKind::random;
    LMConfig lm;
    TrainReport train;
    ErrorReport errors;
    /// (iteration, l_inf, l2) samples taken during training.
    std::vector<std::tuple<int, double, double>> error_history;
    double seconds = 0.0;
    std::string version = DCSNN_VERSION;
    RunStatus status = RunStatus::ok;
    std::string message;
};

inline json record_to_json(const RunRecord& r) {
    return {{"config", r.config},
            {"preset", r.preset},
            {"N", r.N},
            {"N_p", r.N_p},
            {"dist", std::string(to_string(r.dist))},
            {"lm", lm_config_to_json(r.lm)},
            {"train", report_to_json(r.train)},
            {"errors", error_report_to_json(r.errors)},
            {"seconds", r.seconds},
            {"version", r.version},
            {"status", std::string(to_string(r.status))},
            {"message", r.message}};
}

namespace detail {

/// Writes through a sibling temporary so readers never see a partial file.
template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& write) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        write(os);
        if (!os) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline Preset resolve_preset(const RunConfig& cfg) {
    return cfg.problem ? preset_from_json(*cfg.problem) : preset(cfg.preset);
}

}  // namespace detail

/// Outputs: record.json, loss_history.csv, error_history.csv, points.csv.
inline void write_run_outputs(const std::filesystem::path& dir, const RunRecord& rec, const std::string& points_csv) {
    std::filesystem::create_directories(dir);
    detail::write_atomically(dir / "record.json", [&](std::ostream& os) { os << record_to_json(rec).dump(2) << '\n'; });
    detail::write_atomically(dir / "loss_history.csv", [&](std::ostream& os) { write_loss_history_csv(os, rec.train); });
    detail::write_atomically(dir / "error_history.csv", [&](std::ostream& os) {
        os << "iteration,l_inf,l2\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (const auto& [it, linf, l2] : rec.error_history) os << it << ',' << linf << ',' << l2 << '\n';
    });
    detail::write_atomically(dir / "points.csv", [&](std::ostream& os) { os << points_csv; });
}

inline RunRecord run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Preset p = detail::resolve_preset(cfg);

    RunRecord rec;
    rec.config = run_config_to_json(cfg);
    rec.preset = p.name;
    rec.N = cfg.neurons > 0 ? cfg.neurons : p.neurons.at(0);
    rec.N_p = p.param_count(rec.N);
    rec.dist = cfg.dist.value_or(p.default_dist);
    rec.lm = lm_config_from_json(cfg.lm, p.lm);

    const int d = p.dim();
    const auto init_seed = cfg.init_seed.value_or(p.init_seed);
    const auto sample_seed = cfg.sample_seed.value_or(p.sample_seed);
    const auto test_seed = cfg.test_seed.value_or(p.test_seed);
    const auto p0 = init_params(d, rec.N, init_seed).flatten();

    auto evaluate = [&](const Vector& flat) {
        return evaluate_errors(ShallowNetParams::unflatten(d, rec.N, flat), p.geom, p.exact, p.n_test(), test_seed);
    };
    TrainObserver observer;
    if (cfg.error_every > 0) {
        observer = [&](int iter, const Vector& flat, double) {
            if (iter % cfg.error_every != 0) return;
            const auto e = evaluate(flat);
            rec.error_history.emplace_back(iter, e.l_inf, e.l2);
        };
    }

    std::ostringstream points;
    if (p.kind == PresetKind::fit) {
        const auto data = p.fit_dataset(rec.dist, sample_seed);
        write_fit_dataset_csv(points, data);
        rec.train = train(FitModel(d, rec.N, data), p0, rec.lm, observer);
    } else {
        const auto problem = p.problem();
        const auto colloc = p.collocation(rec.dist, sample_seed);
        write_collocation_csv(points, colloc, d);
        rec.train = train(PdeModel(d, rec.N, problem, colloc), p0, rec.lm, observer);
    }

    rec.errors = evaluate(rec.train.final_params);
    rec.message = rec.train.message;
    switch (rec.train.stop_reason) {
        case StopReason::tolerance:
        case StopReason::max_iters: rec.status = RunStatus::ok; break;
        case StopReason::stall: rec.status = RunStatus::stalled; break;
        case StopReason::numerical_failure: rec.status = RunStatus::failed; break;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!cfg.out_dir.empty()) write_run_outputs(cfg.out_dir, rec, points.str());
    return rec;
}

inline constexpr const char* sweep_header = "preset,N,N_p,distribution,l_inf,l2,rel_l2,iterations,seconds,status";

inline void write_sweep_row(std::ostream& os, const RunRecord& r) {
    os << r.preset << ',' << r.N << ',' << r.N_p << ',' << to_string(r.dist) << ',' << r.errors.l_inf << ','
       << r.errors.l2 << ',' << r.errors.rel_l2 << ',' << r.train.iterations << ',' << r.seconds << ','
       << to_string(r.status) << '\n';
}

/// Expands list-valued "neurons" and "dist" fields into one config per
/// combination. Each entry may set any RunConfig field.
inline std::vector<RunConfig> expand_sweep(const json& spec) {
    const json runs = spec.contains("runs") ? spec.at("runs") : json::array({spec});
    std::vector<RunConfig> out;
    for (const auto& entry : runs) {
        json base = entry;
        const json neurons = entry.contains("neurons") && entry.at("neurons").is_array() ? entry.at("neurons")
                                                                                           : json::array({entry.value("neurons", 0)});
        json dists = json::array({nullptr});
        if (entry.contains("dist")) dists = entry.at("dist").is_array() ? entry.at("dist") : json::array({entry.at("dist")});
        base.erase("neurons");
        base.erase("dist");
        base.erase("out");
        for (const auto& n : neurons) {
            for (const auto& dist : dists) {
                json one = base;
                one["neurons"] = n;
                if (!dist.is_null()) one["dist"] = dist;
                out.push_back(run_config_from_json(one));
            }
        }
    }
    if (out.empty()) throw std::invalid_argument("sweep: no runs configured");
    return out;
}

/// Runs every config in order, writing one CSV row each. A run that throws
/// is recorded as failed and the sweep continues.
inline std::vector<RunRecord> sweep(const std::vector<RunConfig>& configs, std::ostream& table,
                                    const std::filesystem::path& out_dir = {}) {
    if (configs.empty()) throw std::invalid_argument("sweep: empty config list");
    table << sweep_header << '\n' << std::setprecision(6);
    std::vector<RunRecord> records;
    for (auto cfg : configs) {
        RunRecord rec;
        try {
            if (cfg.neurons <= 0) cfg.neurons = detail::resolve_preset(cfg).neurons.at(0);
            if (!out_dir.empty() && cfg.out_dir.empty()) {
                const auto dist_name = cfg.dist ? std::string(to_string(*cfg.dist)) : std::string("default");
                cfg.out_dir = (out_dir / (cfg.preset + "_N" + std::to_string(cfg.neurons) + "_" + dist_name)).string();
            }
            rec = run(cfg);
        } catch (const std::exception& e) {
            rec.config = run_config_to_json(cfg);
            rec.preset = cfg.preset;
            rec.N = cfg.neurons;
            try {
                rec.N_p = detail::resolve_preset(cfg).param_count(cfg.neurons);
            } catch (const std::exception&) {
            }
            rec.dist = cfg.dist.value_or(NodeKind::random);
            rec.train.loss_history = {std::numeric_limits<double>::quiet_NaN()};
            rec.errors = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN(), 0, 0};
            rec.status = RunStatus::failed;
            rec.message = e.what();
        }
        write_sweep_row(table, rec);
        table.flush();
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace dcsnn
