// Acceptance run: trains every shipped preset with its shipped seeds and
// prints one PASS/FAIL line per criterion. Exit status is nonzero if any
// criterion fails.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dcsnn/harness.hpp"
#include "dcsnn/validate.hpp"

using namespace dcsnn;

namespace {

struct Criterion {
    std::string name;
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) passed = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<RunRecord> all_runs;

RunRecord train_preset(const std::string& name, int N, std::optional<NodeKind> dist = std::nullopt) {
    RunConfig cfg;
    cfg.preset = name;
    cfg.neurons = N;
    cfg.dist = dist;
    auto rec = run(cfg);
    std::cerr << "  " << name << " N=" << N << " " << to_string(rec.dist) << ": l_inf=" << fmt(rec.errors.l_inf)
              << " l2=" << fmt(rec.errors.l2) << " rel_l2=" << fmt(rec.errors.rel_l2)
              << " loss=" << fmt(rec.train.final_loss()) << " iters=" << rec.train.iterations
              << " stop=" << to_string(rec.train.stop_reason) << " " << rec.seconds << "s\n";
    all_runs.push_back(rec);
    return rec;
}

std::string label_of(const RunRecord& r) {
    return r.preset + " N=" + std::to_string(r.N) + " " + std::string(to_string(r.dist));
}

void check_ok(Criterion& c, const RunRecord& r, double seconds_limit) {
    c.require(r.status == RunStatus::ok, label_of(r) + " status " + std::string(to_string(r.status)));
    c.require(r.seconds < seconds_limit, label_of(r) + " took " + fmt(r.seconds) + "s < " + fmt(seconds_limit) + "s");
}

void check_max(Criterion& c, const RunRecord& r, const char* what, double value, double bound) {
    c.require(value <= bound, label_of(r) + " " + what + " " + fmt(value) + " <= " + fmt(bound));
}

}  // namespace

int main() {
    std::vector<Criterion> results(7);

    {
        auto& c = results[0];
        c.name = "fit1d: N=5, M=100, L_inf <= 1e-5 within 10 s";
        const auto r = train_preset("fit1d", 5);
        check_ok(c, r, 10.0);
        check_max(c, r, "l_inf", r.errors.l_inf, 1e-5);
        c.require(r.lm.loss_tol == 1e-12, "loss_tol " + fmt(r.lm.loss_tol));
    }
    {
        auto& c = results[1];
        c.name = "ex1: Chebyshev N=10 L_inf <= 3e-4, N=20 L_inf <= 1e-5, Chebyshev <= random at N=20";
        const auto a = train_preset("ex1", 10, NodeKind::chebyshev);
        const auto b = train_preset("ex1", 20, NodeKind::chebyshev);
        const auto rnd = train_preset("ex1", 20, NodeKind::random);
        for (const auto* r : {&a, &b, &rnd}) check_ok(c, *r, 120.0);
        check_max(c, a, "l_inf", a.errors.l_inf, 3e-4);
        check_max(c, b, "l_inf", b.errors.l_inf, 1e-5);
        check_max(c, b, "l_inf vs random", b.errors.l_inf, rnd.errors.l_inf);
    }
    {
        auto& c = results[2];
        c.name = "ex2: N=50 rel_L2 <= 5e-3, N=100 rel_L2 <= 1e-3, each within 5 min";
        const auto a = train_preset("ex2", 50);
        const auto b = train_preset("ex2", 100);
        for (const auto* r : {&a, &b}) check_ok(c, *r, 300.0);
        check_max(c, a, "rel_l2", a.errors.rel_l2, 5e-3);
        check_max(c, b, "rel_l2", b.errors.rel_l2, 1e-3);
    }
    {
        auto& c = results[3];
        c.name = "ex3: N=20 L_inf <= 5e-4, L2 <= 1e-4 within 2 min";
        const auto r = train_preset("ex3", 20);
        check_ok(c, r, 120.0);
        check_max(c, r, "l_inf", r.errors.l_inf, 5e-4);
        check_max(c, r, "l2", r.errors.l2, 1e-4);
    }
    {
        auto& c = results[4];
        c.name = "ex4: Chebyshev N=20 L_inf <= 5e-3, N=30 L_inf <= 5e-4, each within 5 min";
        const auto a = train_preset("ex4", 20, NodeKind::chebyshev);
        const auto b = train_preset("ex4", 30, NodeKind::chebyshev);
        for (const auto* r : {&a, &b}) check_ok(c, *r, 300.0);
        check_max(c, a, "l_inf", a.errors.l_inf, 5e-3);
        check_max(c, b, "l_inf", b.errors.l_inf, 5e-4);
    }
    {
        auto& c = results[5];
        c.name = "ex5: N=10 L_inf <= 5e-3, final loss nonincreasing over N = 10, 30, 50, each within 10 min";
        std::vector<RunRecord> runs;
        for (int N : {10, 30, 50}) runs.push_back(train_preset("ex5", N));
        for (const auto& r : runs) check_ok(c, r, 600.0);
        check_max(c, runs[0], "l_inf", runs[0].errors.l_inf, 5e-3);
        for (std::size_t k = 1; k < runs.size(); ++k) {
            check_max(c, runs[k], "final loss", runs[k].train.final_loss(), runs[k - 1].train.final_loss());
        }
    }
    {
        auto& c = results[6];
        c.name = "property suite: counts, derivatives, damped step, monotone accepted steps, manufactured "
                 "residuals, loss decomposition, collocation invariants";
        int failed = 0;
        const auto checks = run_validation();
        for (const auto& chk : checks) {
            if (!chk.passed) {
                c.require(false, chk.name + ": " + chk.detail);
                ++failed;
            }
        }
        c.require(failed == 0, std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) +
                                   " self-checks");
        int violations = 0;
        std::size_t accepted = 0;
        for (const auto& r : all_runs) {
            const auto& h = r.train.loss_history;
            for (std::size_t k = 0; k < r.train.accepted.size(); ++k) {
                if (!r.train.accepted[k]) continue;
                ++accepted;
                if (!(h[k + 1] < h[k])) ++violations;
            }
        }
        c.require(violations == 0, std::to_string(accepted) + " accepted steps over " + std::to_string(all_runs.size()) +
                                       " runs strictly decrease the loss");
    }

    int failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& c = results[i];
        std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << c.name << "): " << c.detail.str()
                  << '\n';
        failures += c.passed ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << '\n';
    return failures == 0 ? 0 : 1;
}
