#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lrb/algs.hpp"
#include "lrb/env.hpp"

namespace lrb {

enum class StrategyKind { UniformEba, SeedEstimator, SpannerRegression };

struct StrategySpec {
    StrategyKind kind = StrategyKind::UniformEba;
    std::string label = "uniform_eba";
    // Sampler override. Unset means the kind's default: round robin for the
    // empirical-best-arm baseline, independent uniform draws for the
    // seed estimator.
    std::optional<bool> round_robin_sampler;
    std::optional<Vector> weights; // seed estimator sampling law, default uniform
    bool exact_spanner_basis = true;
    double spanner_c = 2.0;
};

using ModelSpec = std::variant<RewardModel, PhasedModel>;

struct ExperimentConfig {
    ModelSpec model;
    StrategySpec strategy;
    StoppingRule stopping = FixedHorizon{1};
    std::int64_t trials = 1;
    std::uint64_t base_seed = 0;
    // Reward randomness is keyed separately so the same arm sequence can be
    // replayed against fresh environment draws. Defaults to base_seed.
    std::optional<std::uint64_t> env_seed;
    int threads = 0;               // 0 picks hardware concurrency
    bool per_round = false;        // record a regret curve per trial
    std::int64_t curve_stride = 0; // 0 targets about 100 curve points
};

struct TrialResult {
    std::vector<std::int64_t> ns;   // checkpoint horizons, ascending
    std::vector<std::size_t> picks; // recommended arm per checkpoint
    std::vector<double> regrets;
    std::uint64_t arm_hash = 0; // FNV-1a over the arm sequence
    std::vector<std::pair<std::int64_t, double>> curve;
};

struct RegretSummary {
    std::string strategy;
    std::int64_t n = 0;
    std::size_t d = 0;
    std::size_t n_arms = 0;
    std::int64_t trials = 0;
    double mean = 0.0;
    double se = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
};

struct MonteCarloResult {
    std::vector<RegretSummary> rows; // one per checkpoint
    std::vector<TrialResult> trials; // indexed by trial number
};

struct SweepSlope {
    std::string strategy;
    std::size_t d = 0;
    std::size_t n_arms = 0;
    bool defined = false;
    double value = 0.0;
};

struct SweepResult {
    std::vector<RegretSummary> rows;
    std::vector<SweepSlope> slopes;
};

// Gap between the best mean and the chosen arm's mean. Always in [0, 2]
// for rewards bounded by 1 in magnitude.
double simple_regret(const Vector& means, std::size_t pick);

const RewardModel& model_at_round(const ModelSpec& model, std::int64_t t);

// Phased models average their per-phase means; a recommendation is judged
// against the whole run.
Vector model_true_means(const ModelSpec& model);

ValidationReport validate_spec_model(const ModelSpec& model);

// One full protocol run: schedule an arm, observe one reward entry, update
// the strategy state, recommend at each checkpoint. Arm choices read only
// the sampler stream, so rewards can never influence them.
TrialResult run_trial(const ExperimentConfig& cfg, std::int64_t trial_index);

// Trials are independent (counter-based streams keyed by trial index), so
// execution may be spread over threads; results are merged in index order
// and aggregates are identical for any thread count.
MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg);

// Runs every config and fits a log-log slope of mean regret against n for
// each (strategy, d, N) group, skipping zero means.
SweepResult scaling_sweep(const std::vector<ExperimentConfig>& grid);

// OLS slope of ln(mean) on ln(n). Points with zero mean are dropped;
// nullopt when fewer than two usable points remain.
std::optional<double> fit_loglog_slope(
    const std::vector<std::pair<double, double>>& points);

std::uint64_t fnv1a_step(std::uint64_t h, std::uint64_t value);

} // namespace lrb
