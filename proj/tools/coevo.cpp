// coevo: grow exploration-driven random trees, compute their limit constants,
// and run the theorem-vs-simulation experiment suite.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coevo/coevo.hpp"

namespace {

using coevo::ordered_json;

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw coevo::Error("cannot open " + path + " for writing");
    os << content;
}

int cmd_constants(const std::string& pmf_spec, double damping, int k_max,
                  bool as_json) {
    const coevo::StepDistribution d = coevo::parse_pmf_spec(pmf_spec);
    const coevo::ModelConstants c = coevo::compute_constants(d);
    ordered_json j = coevo::constants_to_json(c);
    j["pagerank_exponent"] = coevo::exponent_to_json(
        coevo::predicted_pagerank_exponent(d, c, damping));
    j["damping"] = damping;
    if (k_max > 0) {
        ordered_json trace = ordered_json::array();
        for (int k = 5; k <= k_max; k += 5) {
            const auto kern =
                coevo::truncated_kernel(d, coevo::TruncatedKernel::Kind::A, k);
            const auto p = coevo::perron_eigen(kern, c.tol.rayleigh);
            trace.push_back({{"k", k}, {"alpha_k", p.eigenvalue}});
        }
        j["alpha_k_trace"] = trace;
    }
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "pmf        " << d.describe() << "\n"
                  << "E[Z]       " << c.mean_z << "\n"
                  << "s0         " << c.s0.to_string() << "\n"
                  << "R          " << c.R.to_string() << "\n"
                  << "q*         " << c.q_star << "\n"
                  << "kappa0     " << c.kappa0 << " (argmin " << c.kappa0_minimizer
                  << ")\n"
                  << "regime     " << coevo::regime_name(c.regime) << "\n"
                  << "degree exp " << coevo::exponent_to_json(c.degree_exponent).dump()
                  << "\n"
                  << "pr exp(c=" << damping << ") "
                  << j["pagerank_exponent"].dump() << "\n";
        for (const auto& f : c.assumption_flags)
            std::cout << "flag       " << f << "\n";
    }
    return 0;
}

int cmd_rw_hitting(const std::string& pmf_spec, int K, int N,
                   const std::string& csv_path) {
    const coevo::StepDistribution d = coevo::parse_pmf_spec(pmf_spec);
    const auto table = coevo::hitting_time_table(d, K, N);
    std::ostringstream csv;
    csv << "k,i,prob\n";
    for (int k = 1; k <= K; ++k)
        for (int i = 0; i <= N; ++i)
            if (table.at(k, i) > 0.0) csv << k << "," << i << "," << table.at(k, i) << "\n";
    if (csv_path.empty())
        std::cout << csv.str();
    else
        write_text(csv_path, csv.str());
    std::cerr << "trunc_error " << table.trunc_error << "\n";
    return 0;
}

int cmd_rw_profile(const std::string& pmf_spec, int k, double t, int steps) {
    const coevo::StepDistribution d = coevo::parse_pmf_spec(pmf_spec);
    const auto table = coevo::hitting_time_table(d, k, steps);
    const auto v = coevo::expected_profile(table, k, t);
    ordered_json j;
    j["pmf"] = d.describe();
    j["k"] = k;
    j["t"] = t;
    j["value"] = v.value;
    j["error_bound"] = v.error_bound;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_grow(const std::string& pmf_spec, std::optional<std::uint64_t> n,
             std::optional<double> t, const std::string& variant,
             std::uint64_t seed, const std::string& out,
             const std::string& stats_path) {
    coevo::GrowthConfig cfg;
    cfg.seed = seed;
    cfg.target_n = n;
    cfg.target_t = t;
    if (variant == "discrete") {
        cfg.variant = coevo::GrowthVariant::Discrete;
    } else if (variant == "continuous") {
        cfg.variant = coevo::GrowthVariant::Continuous;
    } else if (variant == "killed") {
        cfg.variant = coevo::GrowthVariant::Killed;
    } else if (variant.rfind("pr:", 0) == 0) {
        cfg.variant = coevo::GrowthVariant::PageRankAttach;
        cfg.damping = std::stod(variant.substr(3));
    } else {
        throw coevo::ParamOutOfRange("unknown variant '" + variant + "'");
    }
    if (!pmf_spec.empty()) cfg.pmf = coevo::parse_pmf_spec(pmf_spec);
    const coevo::TreeState tree = coevo::grow(cfg);
    if (!out.empty()) {
        if (out.size() >= 4 && out.substr(out.size() - 4) == ".tsv")
            coevo::save_tree_tsv(tree, out);
        else
            coevo::save_tree_binary(tree, out);
    }
    if (!stats_path.empty()) {
        ordered_json j;
        j["n"] = tree.n();
        j["height"] = coevo::height(tree);
        j["root_degree"] = coevo::root_degree(tree);
        j["seed"] = tree.seed;
        j["provenance"] = tree.provenance;
        if (tree.has_birth_times()) {
            j["last_birth_time"] = tree.birth_time.back();
            j["martingale_w"] = coevo::martingale_w(tree);
        }
        write_text(stats_path, ordered_json(j).dump(2) + "\n");
    }
    std::cerr << "grew " << tree.n() << " vertices, height " << coevo::height(tree)
              << "\n";
    return 0;
}

int cmd_stats(const std::string& in, double pagerank_c, int fringe_size,
              bool as_json, const std::string& csv_dir) {
    const coevo::TreeState tree = coevo::load_tree_binary(in);
    ordered_json j;
    j["n"] = tree.n();
    j["height"] = coevo::height(tree);
    j["root_degree"] = coevo::root_degree(tree);
    const auto hist = coevo::degree_histogram(tree);
    // columns: k, count, ccdf
    std::ostringstream deg_csv;
    deg_csv << "k,count,ccdf\n";
    std::uint64_t above = tree.n();
    for (std::size_t k = 1; k < hist.size(); ++k) {
        deg_csv << k << "," << hist[k] << ","
                << static_cast<double>(above) / static_cast<double>(tree.n()) << "\n";
        above -= hist[k];
    }
    if (pagerank_c > 0.0) {
        const auto pr = coevo::pagerank_scores(tree, pagerank_c);
        double mx = 0.0;
        for (double s : pr.scores) mx = std::max(mx, s);
        j["pagerank"] = {{"damping", pagerank_c},
                         {"root_score", pr.scores[0]},
                         {"max_score", mx},
                         {"total_defect", coevo::pagerank_total_defect(tree, pr)}};
    }
    if (fringe_size > 0) {
        const auto fh = coevo::fringe_histogram(tree, fringe_size);
        ordered_json counts;
        for (const auto& [code, count] : fh.counts) counts[code] = count;
        j["fringe"] = {{"max_size", fringe_size},
                       {"counts", counts},
                       {"overflow", fh.overflow}};
    }
    if (!csv_dir.empty()) {
        std::filesystem::create_directories(csv_dir);
        write_text(csv_dir + "/degree_ccdf.csv", deg_csv.str());
    }
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << j.dump() << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& preset_name,
                   const std::string& out, const std::string& csv_dir) {
    coevo::ExperimentSpec spec;
    if (!preset_name.empty()) {
        spec = coevo::preset(preset_name);
    } else if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw coevo::Error("cannot open " + config_path);
        nlohmann::json j;
        is >> j;
        spec = coevo::spec_from_json(j);
    } else {
        throw coevo::ParamOutOfRange("experiment: need --config or --preset");
    }
    const coevo::ExperimentReport rep = coevo::run_experiment(spec);
    const std::string doc = rep.full_doc().dump(2) + "\n";
    if (out.empty())
        std::cout << doc;
    else
        write_text(out, doc);
    if (!csv_dir.empty()) {
        std::filesystem::create_directories(csv_dir);
        for (const auto& [stem, content] : rep.csv)
            write_text(csv_dir + "/" + stem + ".csv", content);
    }
    std::cerr << (rep.pass ? "PASS" : "FAIL") << " "
              << coevo::kind_name(spec.kind) << " (" << rep.wall_time_s << " s)\n";
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-evolving tree network simulator and analyzer"};
    app.require_subcommand(1);

    // constants
    std::string pmf_spec;
    double damping = 0.5;
    int k_max = 0;
    bool as_json = false;
    auto* constants = app.add_subcommand("constants", "limit constants from the pgf");
    constants->add_option("--pmf", pmf_spec, "step law (geometric:0.3, pmf:0.4,0,0.6, ...)")
        ->required();
    constants->add_option("--damping", damping, "PageRank damping factor");
    constants->add_option("--k", k_max, "alpha_k trace up to this truncation");
    constants->add_flag("--json", as_json, "emit JSON");

    // rw hitting / rw profile
    auto* rw = app.add_subcommand("rw", "random-walk functionals");
    rw->require_subcommand(1);
    std::string rw_pmf, rw_csv;
    int rw_k = 1, rw_steps = 256;
    double rw_t = 2.0;
    auto* hitting = rw->add_subcommand("hitting", "hitting-time distribution grid");
    hitting->add_option("--pmf", rw_pmf)->required();
    hitting->add_option("--k", rw_k, "max start level");
    hitting->add_option("--steps", rw_steps, "max steps N");
    hitting->add_option("--csv", rw_csv, "write grid CSV here");
    auto* profile = rw->add_subcommand("profile", "expected profile E[P_k(t)]");
    profile->add_option("--pmf", rw_pmf)->required();
    profile->add_option("--k", rw_k);
    profile->add_option("--t", rw_t);
    profile->add_option("--steps", rw_steps);

    // grow
    std::string grow_pmf, grow_variant = "discrete", grow_out, grow_stats;
    std::uint64_t grow_n = 0, grow_seed = 1;
    double grow_t = 0.0;
    auto* grow = app.add_subcommand("grow", "grow one random tree");
    grow->add_option("--pmf", grow_pmf, "step law (unused for pr:<c>)");
    grow->add_option("--n", grow_n, "vertex-count target");
    grow->add_option("--t", grow_t, "time-horizon target");
    grow->add_option("--variant", grow_variant,
                     "discrete | continuous | killed | pr:<c>");
    grow->add_option("--seed", grow_seed);
    grow->add_option("--out", grow_out, "tree file (.bin default, .tsv for text)");
    grow->add_option("--stats", grow_stats, "summary JSON path");

    // stats
    std::string stats_in, stats_csv_dir;
    double stats_pr = 0.0;
    int stats_fringe = 0;
    bool stats_json = false;
    auto* stats_cmd = app.add_subcommand("stats", "read-only statistics of a tree file");
    stats_cmd->add_option("--in", stats_in)->required();
    stats_cmd->add_option("--pagerank", stats_pr, "damping factor");
    stats_cmd->add_option("--fringe", stats_fringe, "fringe histogram size cap");
    stats_cmd->add_flag("--json", stats_json);
    stats_cmd->add_option("--csv-dir", stats_csv_dir);

    // experiment
    std::string exp_config, exp_preset, exp_out, exp_csv_dir;
    auto* experiment = app.add_subcommand("experiment", "theorem-vs-simulation ensemble");
    experiment->add_option("--config", exp_config, "experiment JSON");
    experiment->add_option("--preset", exp_preset, "acceptance preset A1..A14");
    experiment->add_option("--out", exp_out, "report JSON path");
    experiment->add_option("--csv-dir", exp_csv_dir, "plot-ready CSV directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*constants) return cmd_constants(pmf_spec, damping, k_max, as_json);
        if (*hitting) return cmd_rw_hitting(rw_pmf, rw_k, rw_steps, rw_csv);
        if (*profile) return cmd_rw_profile(rw_pmf, rw_k, rw_t, rw_steps);
        if (*grow)
            return cmd_grow(grow_pmf,
                            grow_n > 0 ? std::optional<std::uint64_t>(grow_n)
                                       : std::nullopt,
                            grow->count("--t") > 0 ? std::optional<double>(grow_t)
                                                   : std::nullopt,
                            grow_variant, grow_seed, grow_out, grow_stats);
        if (*stats_cmd)
            return cmd_stats(stats_in, stats_pr, stats_fringe, stats_json,
                             stats_csv_dir);
        if (*experiment)
            return cmd_experiment(exp_config, exp_preset, exp_out, exp_csv_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
