#include "lrb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrb/config.hpp"
#include "lrb/error.hpp"
#include "lrb/harness.hpp"
#include "lrb/spanner.hpp"
#include "lrb/svg_plot.hpp"
#include "lrb/version.hpp"

namespace lrb {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Integral values keep one decimal so a determinant of 1 prints as 1.0.
std::string fmt_value(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.1f", v);
        return buf;
    }
    return fmt_g(v);
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed: " + p.string());
}

std::string results_csv(const std::vector<RegretSummary>& rows,
                        std::uint64_t seed) {
    std::ostringstream os;
    os << "strategy,n,d,N,trials,mean_regret,stderr,q10,q50,q90,seed\n";
    for (const RegretSummary& r : rows) {
        os << r.strategy << ',' << r.n << ',' << r.d << ',' << r.n_arms << ','
           << r.trials << ',' << fmt_g(r.mean) << ',' << fmt_g(r.se) << ','
           << fmt_g(r.q10) << ',' << fmt_g(r.q50) << ',' << fmt_g(r.q90) << ','
           << seed << '\n';
    }
    return os.str();
}

std::string curve_csv(const std::string& strategy,
                      const std::vector<TrialResult>& trials) {
    std::ostringstream os;
    os << "strategy,trial,t,regret\n";
    for (std::size_t i = 0; i < trials.size(); ++i)
        for (const auto& [t, r] : trials[i].curve)
            os << strategy << ',' << i << ',' << t << ',' << fmt_g(r) << '\n';
    return os.str();
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::string& config_path, const json& echo,
                    std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["config"] = echo;
    m["config_path"] = config_path;
    m["outputs"] = outputs;
    m["seed"] = seed;
    m["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

std::string base_dir_of(const std::string& config_path) {
    return fs::path(config_path).parent_path().string();
}

int run_cmd(const std::string& config_path, const std::string& out_dir,
            int threads_override) {
    const json cfgj = load_config_file(config_path);
    ExperimentConfig cfg =
        parse_experiment_config(cfgj, base_dir_of(config_path));
    if (threads_override > 0) cfg.threads = threads_override;
    {
        const ValidationReport rep = validate_spec_model(cfg.model);
        if (!rep.ok) throw ConfigError("invalid model: " + rep.message);
    }
    fs::create_directories(out_dir);
    std::vector<std::string> outputs = {"manifest.json", "results.csv"};
    if (cfg.per_round) outputs.push_back("curve.csv");
    write_manifest(out_dir, "run", config_path, cfgj, cfg.base_seed, outputs);
    const MonteCarloResult mc = run_monte_carlo(cfg);
    write_file(fs::path(out_dir) / "results.csv",
               results_csv(mc.rows, cfg.base_seed));
    if (cfg.per_round)
        write_file(fs::path(out_dir) / "curve.csv",
                   curve_csv(cfg.strategy.label, mc.trials));
    return 0;
}

int sweep_cmd(const std::string& config_path, const std::string& out_dir,
              int threads_override) {
    const json cfgj = load_config_file(config_path);
    std::vector<ExperimentConfig> grid =
        expand_sweep(cfgj, base_dir_of(config_path));
    for (ExperimentConfig& cfg : grid) {
        if (threads_override > 0) cfg.threads = threads_override;
        const ValidationReport rep = validate_spec_model(cfg.model);
        if (!rep.ok) throw ConfigError("invalid model: " + rep.message);
    }
    fs::create_directories(out_dir);
    write_manifest(out_dir, "sweep", config_path, cfgj, grid.front().base_seed,
                   {"manifest.json", "sweep.csv", "sweep.svg"});
    const SweepResult sweep = scaling_sweep(grid);
    write_file(fs::path(out_dir) / "sweep.csv",
               results_csv(sweep.rows, grid.front().base_seed));

    std::vector<PlotSeries> series;
    for (const SweepSlope& slope : sweep.slopes) {
        PlotSeries s;
        s.label = slope.strategy;
        if (slope.d > 0) s.label += " d=" + std::to_string(slope.d);
        for (const RegretSummary& row : sweep.rows)
            if (row.strategy == slope.strategy && row.d == slope.d &&
                row.n_arms == slope.n_arms)
                s.points.emplace_back(static_cast<double>(row.n), row.mean);
        series.push_back(std::move(s));
    }
    write_file(fs::path(out_dir) / "sweep.svg",
               render_loglog_svg(series, "mean simple regret vs rounds"));

    for (const SweepSlope& slope : sweep.slopes) {
        std::cout << "slope " << slope.strategy << " d=" << slope.d
                  << " N=" << slope.n_arms << " ";
        if (slope.defined)
            std::cout << fmt_value(slope.value) << "\n";
        else
            std::cout << "undefined\n";
    }
    return 0;
}

int spanner_cmd(const std::string& kernel_path, const std::string& mode,
                double c) {
    if (mode != "exact" && mode != "approx")
        throw ConfigError("--mode must be exact or approx");
    const Matrix U = load_kernel_csv(kernel_path);
    const SpannerBasis basis =
        mode == "exact" ? exact_spanner(U) : approx_spanner(U, c);
    const Matrix W = coefficients(U, basis);
    double max_coeff = 0.0;
    for (double w : W.data()) max_coeff = std::max(max_coeff, std::fabs(w));

    std::ostringstream idx;
    for (std::size_t j = 0; j < basis.indices.size(); ++j) {
        if (j > 0) idx << ',';
        idx << (basis.indices[j] + 1); // arms are reported 1-based
    }
    std::cout << "indices " << idx.str() << "\n";
    std::cout << "absdet " << fmt_value(std::fabs(det(basis.V))) << "\n";
    std::cout << "max_coeff " << fmt_value(max_coeff) << "\n";
    return 0;
}

int diag_cmd(const std::string& config_path) {
    const json cfgj = load_config_file(config_path);
    const ExperimentConfig cfg =
        parse_experiment_config(cfgj, base_dir_of(config_path));
    {
        const ValidationReport rep = validate_spec_model(cfg.model);
        if (!rep.ok) throw ConfigError("invalid model: " + rep.message);
    }
    const RewardModel& m0 = model_at_round(cfg.model, 1);
    const std::size_t n_arms = m0.num_arms();
    Vector weights(n_arms, 1.0 / static_cast<double>(n_arms));
    if (cfg.strategy.kind == StrategyKind::SeedEstimator && cfg.strategy.weights)
        weights = *cfg.strategy.weights;

    const auto support = kernel_support(m0.kernel);
    std::vector<Vector> domain;
    for (const Matrix* U : support)
        for (std::size_t r = 0; r < U->rows(); ++r) domain.push_back(U->row(r));

    std::cout << "arms " << n_arms << "\n";
    std::cout << "dim " << m0.dim() << "\n";
    double alpha = -HUGE_VAL;
    double lambda_min = HUGE_VAL;
    for (std::size_t k = 0; k < support.size(); ++k) {
        const DesignDiagnostics diag =
            design_diagnostics(*support[k], weights, domain);
        if (support.size() > 1)
            std::cout << "kernel " << k << ": alpha " << fmt_value(diag.alpha)
                      << " lambda_min " << fmt_value(diag.lambda_min) << "\n";
        alpha = std::max(alpha, diag.alpha);
        lambda_min = std::min(lambda_min, diag.lambda_min);
    }
    std::cout << "alpha " << fmt_value(alpha) << "\n";
    std::cout << "lambda_min " << fmt_value(lambda_min) << "\n";

    double norm_pair = 0.0;
    if (std::holds_alternative<PhasedModel>(cfg.model)) {
        for (const RewardModel& phase : std::get<PhasedModel>(cfg.model).phases)
            norm_pair = std::max(norm_pair, norm_pair_bound(phase));
    } else {
        norm_pair = norm_pair_bound(std::get<RewardModel>(cfg.model));
    }
    std::cout << "norm_pair " << fmt_value(norm_pair) << "\n";
    return 0;
}

} // namespace

int cli_execute(const std::vector<std::string>& args) {
    CLI::App app{"pure exploration simulators for low-rank bandit rewards"};
    app.name("lrb");
    app.require_subcommand(1);

    std::string run_config, run_out;
    int run_threads = 0;
    CLI::App* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--config", run_config, "JSON experiment config")->required();
    run->add_option("--out", run_out, "output directory")->required();
    run->add_option("--threads", run_threads, "worker threads (0 = auto)");

    std::string sweep_config, sweep_out;
    int sweep_threads = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "run a scaling grid");
    sweep->add_option("--config", sweep_config, "JSON sweep config")->required();
    sweep->add_option("--out", sweep_out, "output directory")->required();
    sweep->add_option("--threads", sweep_threads, "worker threads (0 = auto)");

    std::string spanner_kernel, spanner_mode = "exact";
    double spanner_c = 2.0;
    CLI::App* spanner = app.add_subcommand("spanner", "report a spanner basis");
    spanner->add_option("--kernel", spanner_kernel, "kernel CSV, one arm per row")
        ->required();
    spanner->add_option("--mode", spanner_mode, "exact or approx");
    spanner->add_option("--c", spanner_c, "approximation bound (approx mode)");

    std::string diag_config;
    CLI::App* diag = app.add_subcommand("diag", "print design diagnostics");
    diag->add_option("--config", diag_config, "JSON experiment config")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (*run) return run_cmd(run_config, run_out, run_threads);
        if (*sweep) return sweep_cmd(sweep_config, sweep_out, sweep_threads);
        if (*spanner) return spanner_cmd(spanner_kernel, spanner_mode, spanner_c);
        if (*diag) return diag_cmd(diag_config);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const RankError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

} // namespace lrb
