// Acceptance suite: runs every preset criterion A1..A14 at its pinned
// tolerance and prints one pass/fail line per criterion. Exit code 0 iff all
// pass.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "coevo/experiment.hpp"

namespace {

struct Criterion {
    const char* id;
    const char* description;
    double runtime_budget_s;
};

const std::vector<Criterion> kCriteria = {
    {"A1", "closed-form constants (s0, R, q*) within 1e-9", 1},
    {"A2", "alpha_k nondecreasing, |alpha_200 - 1/R| <= 1e-2 for geometric(0.3)", 5},
    {"A3", "E[P_1(2)] series equals killed-simulation mean within 3 SE", 30},
    {"A4", "mean root degree of T*(tau): 1 (fringe) and q* (non-fringe) within 2%", 60},
    {"A5", "root condensation: deg(root)/n in 1-q* +- 0.02 at n=1e6", 120},
    {"A6", "fringe convergence: TV <= 0.02 on trees of size <= 3", 120},
    {"A7", "height scaling: det(0) in [2.2,3.0] monotone; geometric(0.5) within 15%", 180},
    {"A8", "BRW speed: B(14)/14 within 15% of kappa0 for geometric(0.5)", 120},
    {"A9", "degree tail: Hill exponent in [1.8,2.2] vs R=2 for affine(0.5)", 120},
    {"A10", "pagerank phase transition: exponent drop >= 0.8 between dampings", 240},
    {"A11", "pagerank DP equals brute-force path counts, 500 trees, <= 1e-12", 10},
    {"A12", "pagerank attachment ~ geometric(0.3) degrees (chi2 at alpha=0.001)", 120},
    {"A13", "moment bound: mean P*_s0(2) below (p0/f(s0)) e^{2/R} band", 60},
    {"A14", "byte-identical trees from fixed seeds, all variants", 60},
};

std::string summarize(const coevo::ExperimentReport& rep) {
    const auto& d = rep.doc;
    auto num = [&](const char* key) -> std::string {
        if (!d.contains(key)) return "";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", d[key].get<double>());
        return buf;
    };
    std::string s;
    if (d.contains("estimate") && d["estimate"].is_number())
        s += " estimate=" + num("estimate");
    if (d.contains("predicted") && d["predicted"].contains("value") &&
        d["predicted"]["value"].is_number()) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g",
                      d["predicted"]["value"].get<double>());
        s += std::string(" predicted=") + buf;
    }
    if (d.contains("tv_distance")) s += " tv=" + num("tv_distance");
    if (d.contains("separation")) s += " separation=" + num("separation");
    if (d.contains("p_value")) s += " p=" + num("p_value");
    return s;
}

}  // namespace

int main() {
    int failures = 0;
    for (const auto& c : kCriteria) {
        try {
            const coevo::ExperimentSpec spec = coevo::preset(c.id);
            const coevo::ExperimentReport rep = coevo::run_experiment(spec);
            const bool in_budget = rep.wall_time_s <= c.runtime_budget_s;
            const bool pass = rep.pass && in_budget;
            std::printf("[%s] %s: %s%s (%.1f s / budget %.0f s)%s\n",
                        pass ? "PASS" : "FAIL", c.id, c.description,
                        summarize(rep).c_str(), rep.wall_time_s,
                        c.runtime_budget_s, in_budget ? "" : " [over budget]");
            if (!pass) ++failures;
        } catch (const std::exception& e) {
            std::printf("[FAIL] %s: %s -- exception: %s\n", c.id, c.description,
                        e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
