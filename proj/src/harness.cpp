#include "lrb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "lrb/error.hpp"

namespace lrb {

namespace {

enum StreamPurpose : std::uint64_t { kSamplerStream = 0, kEnvStream = 1, kStopStream = 2 };

std::uint64_t stream_id(std::int64_t trial, StreamPurpose purpose) {
    return (static_cast<std::uint64_t>(trial) << 2) | purpose;
}

Vector uniform_weights(std::size_t n_arms) {
    return Vector(n_arms, 1.0 / static_cast<double>(n_arms));
}

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

const Matrix& fixed_kernel_of(const ModelSpec& model) {
    const RewardModel& m = model_at_round(model, 1);
    if (!kernel_is_fixed(m.kernel))
        throw ParameterError(
            "spanner regression needs a kernel that is fixed across rounds");
    if (std::holds_alternative<PhasedModel>(model)) {
        const auto& pm = std::get<PhasedModel>(model);
        const Matrix& U0 = std::get<FixedKernel>(pm.phases.front().kernel).U;
        for (const RewardModel& phase : pm.phases) {
            if (!kernel_is_fixed(phase.kernel) ||
                std::get<FixedKernel>(phase.kernel).U.data() != U0.data())
                throw ParameterError(
                    "spanner regression needs one kernel shared by all phases");
        }
    }
    return std::get<FixedKernel>(m.kernel).U;
}

} // namespace

double simple_regret(const Vector& means, std::size_t pick) {
    if (means.empty()) throw ParameterError("simple_regret: no arms");
    if (pick >= means.size())
        throw ParameterError("simple_regret: recommendation out of range");
    const double best = *std::max_element(means.begin(), means.end());
    return best - means[pick];
}

const RewardModel& model_at_round(const ModelSpec& model, std::int64_t t) {
    if (std::holds_alternative<RewardModel>(model))
        return std::get<RewardModel>(model);
    return std::get<PhasedModel>(model).at_round(t);
}

Vector model_true_means(const ModelSpec& model) {
    if (std::holds_alternative<RewardModel>(model))
        return true_means(std::get<RewardModel>(model));
    const auto& pm = std::get<PhasedModel>(model);
    if (pm.phases.empty()) throw ParameterError("phased model has no phases");
    Vector avg(pm.phases.front().num_arms(), 0.0);
    for (const RewardModel& phase : pm.phases) {
        const Vector mu = true_means(phase);
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += mu[i];
    }
    for (double& x : avg) x /= static_cast<double>(pm.phases.size());
    return avg;
}

ValidationReport validate_spec_model(const ModelSpec& model) {
    if (std::holds_alternative<RewardModel>(model))
        return validate_model(std::get<RewardModel>(model));
    const auto& pm = std::get<PhasedModel>(model);
    if (pm.phases.empty() || pm.phase_len < 1) {
        ValidationReport rep;
        rep.ok = false;
        rep.message = "phased model has no phases";
        return rep;
    }
    for (const RewardModel& phase : pm.phases) {
        ValidationReport rep = validate_model(phase);
        if (!rep.ok) return rep;
    }
    return {};
}

std::uint64_t fnv1a_step(std::uint64_t h, std::uint64_t value) {
    h ^= value;
    h *= 1099511628211ULL;
    return h;
}

namespace {

// Per-config work hoisted out of the trial loop: schedule choice, sampling
// weights, and the spanner basis, which is shared read-only by all trials.
struct PreparedStrategy {
    ArmSchedule sched = UniformRoundRobin{};
    Vector est_weights;
    std::optional<SpannerBasis> basis;
    const Matrix* reg_kernel = nullptr; // points into the config's model
};

PreparedStrategy prepare_strategy(const ExperimentConfig& cfg) {
    const RewardModel& m0 = model_at_round(cfg.model, 1);
    const std::size_t n_arms = m0.num_arms();
    const std::size_t d = m0.dim();
    const StrategySpec& spec = cfg.strategy;
    PreparedStrategy prep;
    switch (spec.kind) {
    case StrategyKind::UniformEba: {
        if (!spec.round_robin_sampler.value_or(true))
            prep.sched = UniformRandom{};
        break;
    }
    case StrategyKind::SeedEstimator: {
        const bool rr = spec.round_robin_sampler.value_or(false);
        if (rr && spec.weights)
            throw ParameterError(
                "seed estimator: round robin sampling ignores weights");
        prep.est_weights = spec.weights ? *spec.weights : uniform_weights(n_arms);
        if (rr)
            prep.sched = UniformRoundRobin{};
        else if (spec.weights)
            prep.sched = WeightedRandom{prep.est_weights};
        else
            prep.sched = UniformRandom{};
        break;
    }
    case StrategyKind::SpannerRegression: {
        const Matrix& U = fixed_kernel_of(cfg.model);
        prep.reg_kernel = &U;
        prep.basis = spec.exact_spanner_basis
                         ? exact_spanner(U)
                         : approx_spanner(U, spec.spanner_c);
        if (prep.basis->indices.size() != d)
            throw Error("prepare_strategy: basis size mismatch");
        prep.sched = SpannerRoundRobin{prep.basis->indices};
        break;
    }
    }
    return prep;
}

TrialResult run_trial_impl(const ExperimentConfig& cfg,
                           const PreparedStrategy& prep,
                           std::int64_t trial_index) {
    if (trial_index < 0) throw ParameterError("run_trial: negative trial index");
    const std::uint64_t env_key = cfg.env_seed.value_or(cfg.base_seed);
    CounterRng sampler_rng(cfg.base_seed, stream_id(trial_index, kSamplerStream));
    CounterRng env_rng(env_key, stream_id(trial_index, kEnvStream));
    CounterRng stop_rng(env_key, stream_id(trial_index, kStopStream));

    const std::vector<std::int64_t> checkpoints =
        stopping_checkpoints(cfg.stopping, stop_rng);
    const std::int64_t horizon = checkpoints.back();

    const RewardModel& m0 = model_at_round(cfg.model, 1);
    const std::size_t n_arms = m0.num_arms();
    const std::size_t d = m0.dim();
    const Vector means = model_true_means(cfg.model);

    const StrategySpec& spec = cfg.strategy;
    const ArmSchedule& sched = prep.sched;
    const Vector& est_weights = prep.est_weights;
    const Matrix* reg_kernel = prep.reg_kernel;
    std::optional<EbaState> eba;
    std::optional<SeedEstimatorState> est;
    std::optional<SpannerRegressionState> reg;
    switch (spec.kind) {
    case StrategyKind::UniformEba:
        eba.emplace(n_arms);
        break;
    case StrategyKind::SeedEstimator:
        est.emplace(n_arms, d);
        break;
    case StrategyKind::SpannerRegression:
        reg.emplace(*prep.basis);
        break;
    }

    // One design inverse per distinct realized kernel.
    std::map<const Matrix*, Matrix> design_cache;
    auto design_inv_for = [&](const Matrix* kernel) -> const Matrix& {
        auto it = design_cache.find(kernel);
        if (it != design_cache.end()) return it->second;
        Matrix inv_mat;
        try {
            inv_mat = inv(sampling_design(*kernel, est_weights));
        } catch (const SingularError&) {
            throw EstimatorError(
                "seed estimator: sampled rows do not span the feature space");
        }
        return design_cache.emplace(kernel, std::move(inv_mat)).first->second;
    };

    auto recommend = [&]() -> std::size_t {
        switch (spec.kind) {
        case StrategyKind::UniformEba:
            return eba_recommend(*eba);
        case StrategyKind::SeedEstimator:
            return seed_estimator_recommend(*est);
        case StrategyKind::SpannerRegression:
            return spanner_regression_recommend(*reg_kernel, *reg);
        }
        throw Error("run_trial: unknown strategy");
    };

    const std::int64_t stride =
        cfg.per_round
            ? (cfg.curve_stride > 0 ? cfg.curve_stride
                                    : std::max<std::int64_t>(1, horizon / 100))
            : 0;

    TrialResult out;
    out.arm_hash = 14695981039346656037ULL;
    std::size_t next_ck = 0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const RewardModel& m = model_at_round(cfg.model, t);
        const std::size_t arm = schedule_arm(sched, t, n_arms, sampler_rng);
        out.arm_hash = fnv1a_step(out.arm_hash, arm);
        const RoundSample rs = sample_round(m, env_rng);
        const double x = rs.rewards[arm];
        switch (spec.kind) {
        case StrategyKind::UniformEba:
            eba->record(arm, x);
            break;
        case StrategyKind::SeedEstimator: {
            const Matrix& design_inv = design_inv_for(rs.kernel);
            est->observe(*rs.kernel,
                         estimate_seed_given(design_inv, rs.kernel->row(arm), x));
            break;
        }
        case StrategyKind::SpannerRegression:
            reg->record(static_cast<std::size_t>((t - 1) %
                                                 static_cast<std::int64_t>(d)),
                        x);
            break;
        }
        if (stride > 0 && (t % stride == 0 || t == horizon)) {
            try {
                out.curve.emplace_back(t, simple_regret(means, recommend()));
            } catch (const InsufficientDataError&) {
                // curve starts once a recommendation exists
            }
        }
        while (next_ck < checkpoints.size() && t == checkpoints[next_ck]) {
            const std::size_t pick = recommend();
            out.ns.push_back(t);
            out.picks.push_back(pick);
            out.regrets.push_back(simple_regret(means, pick));
            ++next_ck;
        }
    }
    return out;
}

} // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::int64_t trial_index) {
    return run_trial_impl(cfg, prepare_strategy(cfg), trial_index);
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ParameterError("run_monte_carlo: trials must be >= 1");
    {
        const ValidationReport rep = validate_spec_model(cfg.model);
        if (!rep.ok) throw ParameterError("invalid model: " + rep.message);
    }

    const PreparedStrategy prep = prepare_strategy(cfg);
    const std::int64_t m = cfg.trials;
    std::vector<TrialResult> results(static_cast<std::size_t>(m));
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::int64_t want = cfg.threads > 0 ? cfg.threads : static_cast<std::int64_t>(hw);
    const std::int64_t n_threads = std::max<std::int64_t>(1, std::min(want, m));

    struct Failure {
        std::int64_t trial;
        std::string message;
    };
    std::vector<std::optional<Failure>> failures(static_cast<std::size_t>(n_threads));

    auto work = [&](std::int64_t worker) {
        const std::int64_t lo = worker * m / n_threads;
        const std::int64_t hi = (worker + 1) * m / n_threads;
        for (std::int64_t i = lo; i < hi; ++i) {
            try {
                results[static_cast<std::size_t>(i)] = run_trial_impl(cfg, prep, i);
            } catch (const std::exception& e) {
                auto& slot = failures[static_cast<std::size_t>(worker)];
                if (!slot) slot = Failure{i, e.what()};
                return;
            }
        }
    };

    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (std::int64_t w = 0; w < n_threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    {
        const Failure* first = nullptr;
        for (const auto& f : failures)
            if (f && (!first || f->trial < first->trial)) first = &*f;
        if (first)
            throw Error("trial " + std::to_string(first->trial) + ": " +
                        first->message);
    }

    const std::size_t n_checkpoints = results.front().ns.size();
    for (const TrialResult& r : results)
        if (r.ns.size() != n_checkpoints)
            throw Error("trials disagree on checkpoint count");

    const RewardModel& m0 = model_at_round(cfg.model, 1);
    const bool geometric = std::holds_alternative<GeometricStopping>(cfg.stopping);

    MonteCarloResult out;
    for (std::size_t k = 0; k < n_checkpoints; ++k) {
        std::vector<double> regrets;
        regrets.reserve(results.size());
        for (const TrialResult& r : results) regrets.push_back(r.regrets[k]);

        RegretSummary s;
        s.strategy = cfg.strategy.label;
        s.n = geometric
                  ? static_cast<std::int64_t>(std::llround(
                        std::get<GeometricStopping>(cfg.stopping).mean_n))
                  : results.front().ns[k];
        s.d = m0.dim();
        s.n_arms = m0.num_arms();
        s.trials = m;
        double sum = 0.0;
        for (double r : regrets) sum += r;
        s.mean = sum / static_cast<double>(m);
        double ss = 0.0;
        for (double r : regrets) ss += (r - s.mean) * (r - s.mean);
        s.se = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) /
                           std::sqrt(static_cast<double>(m))
                     : 0.0;
        std::sort(regrets.begin(), regrets.end());
        s.min = regrets.front();
        s.max = regrets.back();
        s.q10 = quantile_sorted(regrets, 0.1);
        s.q50 = quantile_sorted(regrets, 0.5);
        s.q90 = quantile_sorted(regrets, 0.9);
        if (!(s.mean >= 0.0 && s.mean <= 2.0))
            throw Error("mean regret escaped [0, 2]");
        out.rows.push_back(std::move(s));
    }
    out.trials = std::move(results);
    return out;
}

SweepResult scaling_sweep(const std::vector<ExperimentConfig>& grid) {
    if (grid.empty()) throw ParameterError("scaling_sweep: empty grid");
    SweepResult out;
    for (const ExperimentConfig& cfg : grid) {
        MonteCarloResult mc = run_monte_carlo(cfg);
        for (RegretSummary& row : mc.rows) out.rows.push_back(std::move(row));
    }
    // fit one slope per (strategy, d, N) group, in first-seen order
    std::vector<std::tuple<std::string, std::size_t, std::size_t>> order;
    for (const RegretSummary& row : out.rows) {
        auto key = std::make_tuple(row.strategy, row.d, row.n_arms);
        if (std::find(order.begin(), order.end(), key) == order.end())
            order.push_back(std::move(key));
    }
    for (const auto& key : order) {
        std::vector<std::pair<double, double>> pts;
        for (const RegretSummary& row : out.rows)
            if (std::make_tuple(row.strategy, row.d, row.n_arms) == key)
                pts.emplace_back(static_cast<double>(row.n), row.mean);
        SweepSlope slope;
        slope.strategy = std::get<0>(key);
        slope.d = std::get<1>(key);
        slope.n_arms = std::get<2>(key);
        if (const auto fitted = fit_loglog_slope(pts)) {
            slope.defined = true;
            slope.value = *fitted;
        }
        out.slopes.push_back(std::move(slope));
    }
    return out;
}

std::optional<double> fit_loglog_slope(
    const std::vector<std::pair<double, double>>& points) {
    std::vector<double> xs, ys;
    for (const auto& [n, mean] : points) {
        if (n <= 0.0 || mean <= 0.0) continue;
        xs.push_back(std::log(n));
        ys.push_back(std::log(mean));
    }
    if (xs.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

} // namespace lrb
