#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dcsnn/harness.hpp"
#include "dcsnn/validate.hpp"

using namespace dcsnn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("dcsnn_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(Harness, ZeroIterationRunWritesAllOutputs) {
    const auto dir = scratch_dir("zero");
    RunConfig cfg;
    cfg.preset = "ex1";
    cfg.neurons = 10;
    cfg.lm = {{"max_iters", 0}};
    cfg.out_dir = dir.string();
    const auto rec = run(cfg);
    EXPECT_EQ(rec.train.iterations, 0);
    EXPECT_EQ(rec.status, RunStatus::ok);
    EXPECT_EQ(rec.N_p, 51u);
    for (const char* f : {"record.json", "loss_history.csv", "error_history.csv", "points.csv"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto j = json::parse(std::ifstream(dir / "record.json"));
    EXPECT_EQ(j.at("N_p"), 51);
    EXPECT_EQ(j.at("dist"), "chebyshev");
    EXPECT_EQ(j.at("train").at("stop_reason"), "max_iters");
    EXPECT_EQ(lines_of(dir / "loss_history.csv").size(), 2u);
    EXPECT_EQ(lines_of(dir / "points.csv").size(), 1u + 64 + 32 + 32);
    fs::remove_all(dir);
}

TEST(Harness, ErrorHistoryIsSampledPeriodically) {
    RunConfig cfg;
    cfg.preset = "fit1d";
    cfg.lm = {{"max_iters", 25}};
    cfg.error_every = 10;
    const auto rec = run(cfg);
    ASSERT_EQ(rec.error_history.size(), 3u);
    EXPECT_EQ(std::get<0>(rec.error_history[0]), 0);
    EXPECT_EQ(std::get<0>(rec.error_history[2]), 20);
    for (const auto& [it, linf, l2] : rec.error_history) EXPECT_LE(l2, linf);
}

TEST(Harness, RunsAreDeterministic) {
    RunConfig cfg;
    cfg.preset = "ex3";
    cfg.neurons = 5;
    cfg.lm = {{"max_iters", 15}};
    cfg.error_every = 0;
    const auto a = run(cfg), b = run(cfg);
    EXPECT_EQ(a.train.final_params, b.train.final_params);
    EXPECT_EQ(a.errors.l_inf, b.errors.l_inf);
}

TEST(Harness, ConfigJsonRoundTrip) {
    RunConfig cfg;
    cfg.preset = "ex4";
    cfg.neurons = 30;
    cfg.dist = NodeKind::uniform;
    cfg.init_seed = 9;
    cfg.lm = {{"mu0", 10.0}};
    const auto back = run_config_from_json(run_config_to_json(cfg));
    EXPECT_EQ(back.preset, "ex4");
    EXPECT_EQ(back.neurons, 30);
    EXPECT_EQ(back.dist, NodeKind::uniform);
    EXPECT_EQ(back.init_seed, 9u);
    EXPECT_FALSE(back.sample_seed.has_value());
    EXPECT_EQ(back.lm.at("mu0"), 10.0);
}

TEST(Harness, SweepExpandsListsAndWritesTable) {
    const auto dir = scratch_dir("sweep");
    const json spec = {{"runs", json::array({{{"preset", "ex1"}, {"neurons", {3, 4}}, {"dist", {"chebyshev", "random"}},
                                              {"lm", {{"max_iters", 2}}}, {"error_every", 0}},
                                             {{"preset", "nope"}}})}};
    const auto configs = expand_sweep(spec);
    ASSERT_EQ(configs.size(), 5u);
    std::ostringstream table;
    const auto recs = sweep(configs, table, dir);
    ASSERT_EQ(recs.size(), 5u);
    EXPECT_EQ(recs.back().status, RunStatus::failed);

    std::istringstream is(table.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "preset,N,N_p,distribution,l_inf,l2,rel_l2,iterations,seconds,status");
    int rows = 0;
    while (std::getline(is, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 5);
    EXPECT_TRUE(fs::exists(dir / "ex1_N3_chebyshev" / "record.json"));
    EXPECT_TRUE(fs::exists(dir / "ex1_N4_random" / "loss_history.csv"));
    fs::remove_all(dir);
}

TEST(Harness, SweepRejectsEmptyConfig) {
    EXPECT_THROW(expand_sweep(json{{"runs", json::array()}}), std::invalid_argument);
}

TEST(Harness, CustomProblemReplacesPreset) {
    auto j = preset_to_json(preset("ex1"));
    j["name"] = "custom_ex1";
    j["M"] = 16;
    j["M_b"] = 8;
    j["M_gamma"] = 8;
    RunConfig cfg;
    cfg.problem = j;
    cfg.neurons = 3;
    cfg.lm = {{"max_iters", 3}};
    const auto rec = run(cfg);
    EXPECT_EQ(rec.preset, "custom_ex1");
    EXPECT_EQ(rec.errors.n_test, 1600u);
}

TEST(Validate, AllSelfChecksPass) {
    for (const auto& c : run_validation()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
