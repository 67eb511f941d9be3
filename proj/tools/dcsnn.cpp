// Command-line front end: single runs, sweeps, self-validation and preset export.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dcsnn/harness.hpp"
#include "dcsnn/io.hpp"
#include "dcsnn/validate.hpp"

namespace {

dcsnn::json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return dcsnn::json::parse(is);
}

int report(const dcsnn::RunRecord& r) {
    std::cout << r.preset << " N=" << r.N << " N_p=" << r.N_p << " dist=" << dcsnn::to_string(r.dist)
              << " iterations=" << r.train.iterations << " loss=" << r.train.final_loss()
              << " l_inf=" << r.errors.l_inf << " l2=" << r.errors.l2 << " rel_l2=" << r.errors.rel_l2
              << " seconds=" << r.seconds << " status=" << dcsnn::to_string(r.status) << '\n';
    if (r.status != dcsnn::RunStatus::ok) std::cerr << "run " << dcsnn::to_string(r.status) << ": " << r.message << '\n';
    return r.status == dcsnn::RunStatus::ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discontinuity-capturing shallow network solver for elliptic interface problems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(DCSNN_VERSION));

    std::string config_file, preset_name, problem_file, dist, out_dir;
    int neurons = 0, error_every = 10;
    std::uint64_t init_seed = 0, sample_seed = 0, test_seed = 0;
    int max_iters = -1;
    double loss_tol = -1.0, mu0 = -1.0;

    auto* run_cmd = app.add_subcommand("run", "Train one network and write its record");
    run_cmd->add_option("--config", config_file, "JSON run configuration; flags override it");
    run_cmd->add_option("--preset", preset_name, "Preset name")->check(CLI::IsMember(dcsnn::preset_names()));
    run_cmd->add_option("--problem", problem_file, "JSON problem description replacing the preset");
    run_cmd->add_option("--neurons,-N", neurons, "Hidden neurons (default: preset's first size)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--dist", dist, "Collocation distribution")
        ->check(CLI::IsMember({"chebyshev", "uniform", "random"}));
    run_cmd->add_option("--seed", init_seed, "Initialization seed");
    run_cmd->add_option("--sample-seed", sample_seed, "Collocation seed");
    run_cmd->add_option("--test-seed", test_seed, "Test-point seed");
    run_cmd->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--loss-tol", loss_tol, "Stop once the loss reaches this value")->check(CLI::PositiveNumber);
    run_cmd->add_option("--mu0", mu0, "Initial damping")->check(CLI::PositiveNumber);
    run_cmd->add_option("--error-every", error_every, "Testing-error period in iterations (0 disables)")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--out", out_dir, "Output directory");

    std::string sweep_file, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every configuration in a JSON file and write sweep.csv");
    sweep_cmd->add_option("--config", sweep_file, "Sweep JSON")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sweep_out, "Output directory")->default_val("sweep_out");

    auto* validate_cmd = app.add_subcommand("validate", "Check derivatives, the damped step and preset invariants");

    std::string describe_name;
    auto* describe_cmd = app.add_subcommand("describe", "Print a preset as JSON");
    describe_cmd->add_option("preset", describe_name, "Preset name")
        ->required()
        ->check(CLI::IsMember(dcsnn::preset_names()));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            dcsnn::RunConfig cfg;
            if (!config_file.empty()) cfg = dcsnn::run_config_from_json(read_json_file(config_file));
            if (run_cmd->count("--preset")) cfg.preset = preset_name;
            if (run_cmd->count("--neurons")) cfg.neurons = neurons;
            if (run_cmd->count("--error-every")) cfg.error_every = error_every;
            if (!problem_file.empty()) cfg.problem = read_json_file(problem_file);
            if (!dist.empty()) cfg.dist = dcsnn::node_kind_from_string(dist);
            if (run_cmd->count("--seed")) cfg.init_seed = init_seed;
            if (run_cmd->count("--sample-seed")) cfg.sample_seed = sample_seed;
            if (run_cmd->count("--test-seed")) cfg.test_seed = test_seed;
            if (max_iters >= 0) cfg.lm["max_iters"] = max_iters;
            if (loss_tol > 0) cfg.lm["loss_tol"] = loss_tol;
            if (mu0 > 0) cfg.lm["mu0"] = mu0;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return report(dcsnn::run(cfg));
        }

        if (*sweep_cmd) {
            const auto configs = dcsnn::expand_sweep(read_json_file(sweep_file));
            std::filesystem::create_directories(sweep_out);
            const auto table_path = std::filesystem::path(sweep_out) / "sweep.csv";
            std::ofstream table(table_path);
            if (!table) throw std::runtime_error("cannot open " + table_path.string());
            int code = 0;
            for (const auto& r : dcsnn::sweep(configs, table, sweep_out)) code |= report(r);
            std::cout << "wrote " << table_path.string() << '\n';
            return code;
        }

        if (*validate_cmd) {
            int failed = 0;
            for (const auto& c : dcsnn::run_validation()) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                failed += c.passed ? 0 : 1;
            }
            std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
            return failed == 0 ? 0 : 1;
        }

        if (*describe_cmd) {
            std::cout << dcsnn::preset_to_json(dcsnn::preset(describe_name)).dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
