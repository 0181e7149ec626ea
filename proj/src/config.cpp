#include "lrb/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "lrb/error.hpp"

namespace lrb {

namespace {

using nlohmann::json;

void require_keys(const json& j, const char* where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
    if (!j.is_object())
        throw ConfigError(std::string(where) + ": expected an object");
    std::set<std::string> allowed;
    for (const char* k : required) allowed.insert(k);
    for (const char* k : optional) allowed.insert(k);
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError(std::string(where) + ": unknown key '" +
                              item.key() + "'");
    for (const char* k : required)
        if (!j.contains(k))
            throw ConfigError(std::string(where) + ": missing key '" +
                              std::string(k) + "'");
}

double as_double(const json& j, const char* where) {
    if (!j.is_number())
        throw ConfigError(std::string(where) + ": expected a number");
    return j.get<double>();
}

std::int64_t as_int(const json& j, const char* where) {
    if (!j.is_number_integer())
        throw ConfigError(std::string(where) + ": expected an integer");
    return j.get<std::int64_t>();
}

Vector as_vector(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(where) + ": expected a non-empty array");
    Vector out;
    for (const auto& x : j) out.push_back(as_double(x, where));
    return out;
}

std::vector<int> as_sign_pattern(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(where) + ": expected a non-empty array");
    std::vector<int> out;
    for (const auto& x : j) {
        const std::int64_t v = as_int(x, where);
        if (v != 1 && v != -1)
            throw ConfigError(std::string(where) + ": entries must be +1 or -1");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

Matrix as_matrix(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(where) + ": expected an array of rows");
    std::vector<Vector> rows;
    for (const auto& r : j) rows.push_back(as_vector(r, where));
    try {
        return Matrix::from_rows(rows);
    } catch (const Error& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
}

SeedDistribution parse_seed(const json& j) {
    require_keys(j, "model.seed", {"type"},
                 {"v", "lo", "hi", "points", "probs", "b", "eps"});
    const std::string type = j.at("type").get<std::string>();
    if (type == "point_mass") {
        require_keys(j, "model.seed", {"type", "v"}, {});
        return PointMassSeed{as_vector(j.at("v"), "model.seed.v")};
    }
    if (type == "uniform_box") {
        require_keys(j, "model.seed", {"type", "lo", "hi"}, {});
        return UniformBoxSeed{as_vector(j.at("lo"), "model.seed.lo"),
                              as_vector(j.at("hi"), "model.seed.hi")};
    }
    if (type == "finite") {
        require_keys(j, "model.seed", {"type", "points", "probs"}, {});
        FiniteSupportSeed fs;
        const json& pts = j.at("points");
        if (!pts.is_array() || pts.empty())
            throw ConfigError("model.seed.points: expected a non-empty array");
        for (const auto& p : pts)
            fs.points.push_back(as_vector(p, "model.seed.points"));
        fs.probs = as_vector(j.at("probs"), "model.seed.probs");
        return fs;
    }
    if (type == "signed_basis") {
        require_keys(j, "model.seed", {"type", "b", "eps"}, {});
        return SignedBasisSeed{as_sign_pattern(j.at("b"), "model.seed.b"),
                               as_double(j.at("eps"), "model.seed.eps")};
    }
    throw ConfigError("model.seed.type: unknown value '" + type + "'");
}

KernelDistribution parse_kernel(const json& j, const std::string& base_dir) {
    require_keys(j, "model.kernel", {"type"}, {"rows", "csv", "matrices", "probs"});
    const std::string type = j.at("type").get<std::string>();
    if (type == "fixed") {
        if (j.contains("csv")) {
            require_keys(j, "model.kernel", {"type", "csv"}, {});
            std::filesystem::path p = j.at("csv").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            return FixedKernel{load_kernel_csv(p.string())};
        }
        require_keys(j, "model.kernel", {"type", "rows"}, {});
        return FixedKernel{as_matrix(j.at("rows"), "model.kernel.rows")};
    }
    if (type == "finite") {
        require_keys(j, "model.kernel", {"type", "matrices", "probs"}, {});
        FiniteSupportKernel fk;
        const json& mats = j.at("matrices");
        if (!mats.is_array() || mats.empty())
            throw ConfigError("model.kernel.matrices: expected a non-empty array");
        for (const auto& m : mats)
            fk.mats.push_back(as_matrix(m, "model.kernel.matrices"));
        fk.probs = as_vector(j.at("probs"), "model.kernel.probs");
        return fk;
    }
    throw ConfigError("model.kernel.type: unknown value '" + type + "'");
}

StoppingRule parse_stopping(const json& j) {
    require_keys(j, "stopping", {"type"}, {"n", "mean_n", "ns"});
    const std::string type = j.at("type").get<std::string>();
    if (type == "fixed") {
        require_keys(j, "stopping", {"type", "n"}, {});
        return FixedHorizon{as_int(j.at("n"), "stopping.n")};
    }
    if (type == "geometric") {
        require_keys(j, "stopping", {"type", "mean_n"}, {});
        return GeometricStopping{as_double(j.at("mean_n"), "stopping.mean_n")};
    }
    if (type == "schedule") {
        require_keys(j, "stopping", {"type", "ns"}, {});
        const json& ns = j.at("ns");
        if (!ns.is_array() || ns.empty())
            throw ConfigError("stopping.ns: expected a non-empty array");
        ExplicitSchedule sched;
        for (const auto& n : ns) sched.ns.push_back(as_int(n, "stopping.ns"));
        return sched;
    }
    throw ConfigError("stopping.type: unknown value '" + type + "'");
}

std::int64_t stopping_horizon(const StoppingRule& rule, const char* why) {
    if (std::holds_alternative<FixedHorizon>(rule))
        return std::get<FixedHorizon>(rule).n;
    throw ConfigError(std::string(why) + " requires fixed stopping");
}

ModelSpec parse_model(const json& j, const std::string& base_dir,
                      const StoppingRule& stopping) {
    require_keys(j, "model", {"type"},
                 {"kernel", "seed", "d", "k", "eps", "b", "bs"});
    const std::string type = j.at("type").get<std::string>();
    if (type == "custom") {
        require_keys(j, "model", {"type", "kernel", "seed"}, {});
        RewardModel model;
        model.kernel = parse_kernel(j.at("kernel"), base_dir);
        model.seed = parse_seed(j.at("seed"));
        return model;
    }
    if (type == "hypercube") {
        require_keys(j, "model", {"type", "d", "eps"}, {"b"});
        const std::int64_t d = as_int(j.at("d"), "model.d");
        if (d < 1) throw ConfigError("model.d: must be positive");
        std::vector<int> b(static_cast<std::size_t>(d), 1);
        if (j.contains("b")) b = as_sign_pattern(j.at("b"), "model.b");
        try {
            return make_hypercube_hard_instance(static_cast<std::size_t>(d),
                                                as_double(j.at("eps"), "model.eps"),
                                                b);
        } catch (const Error& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }
    if (type == "block") {
        require_keys(j, "model", {"type", "d", "k", "eps", "bs"}, {});
        const std::int64_t d = as_int(j.at("d"), "model.d");
        const std::int64_t k = as_int(j.at("k"), "model.k");
        if (d < 1 || k < 1) throw ConfigError("model.d, model.k: must be positive");
        const json& jb = j.at("bs");
        if (!jb.is_array() || jb.empty())
            throw ConfigError("model.bs: expected a non-empty array");
        std::vector<std::vector<int>> bs;
        for (const auto& row : jb) bs.push_back(as_sign_pattern(row, "model.bs"));
        const std::int64_t n = stopping_horizon(stopping, "a block model");
        try {
            return make_block_instance(static_cast<std::size_t>(d),
                                       static_cast<std::size_t>(k),
                                       as_double(j.at("eps"), "model.eps"), n, bs);
        } catch (const Error& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }
    throw ConfigError("model.type: unknown value '" + type + "'");
}

StrategySpec parse_strategy(const json& j) {
    require_keys(j, "strategy", {"name"},
                 {"label", "sampler", "weights", "spanner", "c"});
    StrategySpec spec;
    const std::string name = j.at("name").get<std::string>();
    if (name == "uniform_eba")
        spec.kind = StrategyKind::UniformEba;
    else if (name == "seed_estimator")
        spec.kind = StrategyKind::SeedEstimator;
    else if (name == "spanner_regression")
        spec.kind = StrategyKind::SpannerRegression;
    else
        throw ConfigError("strategy.name: unknown value '" + name + "'");
    spec.label = j.contains("label") ? j.at("label").get<std::string>() : name;
    if (spec.label.empty() || spec.label.find(',') != std::string::npos)
        throw ConfigError("strategy.label: must be non-empty without commas");
    if (j.contains("sampler")) {
        const std::string s = j.at("sampler").get<std::string>();
        if (s == "round_robin")
            spec.round_robin_sampler = true;
        else if (s == "random")
            spec.round_robin_sampler = false;
        else
            throw ConfigError("strategy.sampler: unknown value '" + s + "'");
        if (spec.kind == StrategyKind::SpannerRegression)
            throw ConfigError(
                "strategy.sampler: spanner regression fixes its own schedule");
    }
    if (j.contains("weights")) {
        if (spec.kind != StrategyKind::SeedEstimator)
            throw ConfigError("strategy.weights: only the seed estimator samples "
                              "from custom weights");
        spec.weights = as_vector(j.at("weights"), "strategy.weights");
    }
    if (j.contains("spanner")) {
        if (spec.kind != StrategyKind::SpannerRegression)
            throw ConfigError("strategy.spanner: only spanner regression uses it");
        const std::string s = j.at("spanner").get<std::string>();
        if (s == "exact")
            spec.exact_spanner_basis = true;
        else if (s == "approx")
            spec.exact_spanner_basis = false;
        else
            throw ConfigError("strategy.spanner: unknown value '" + s + "'");
    }
    if (j.contains("c")) {
        if (spec.kind != StrategyKind::SpannerRegression)
            throw ConfigError("strategy.c: only spanner regression uses it");
        spec.spanner_c = as_double(j.at("c"), "strategy.c");
        if (!(spec.spanner_c >= 1.0))
            throw ConfigError("strategy.c: must be at least 1");
    }
    return spec;
}

void parse_common(const json& j, ExperimentConfig& cfg) {
    cfg.trials = as_int(j.at("trials"), "trials");
    if (cfg.trials < 1) throw ConfigError("trials: must be at least 1");
    const std::int64_t seed = as_int(j.at("seed"), "seed");
    if (seed < 0) throw ConfigError("seed: must be non-negative");
    cfg.base_seed = static_cast<std::uint64_t>(seed);
    if (j.contains("env_seed")) {
        const std::int64_t es = as_int(j.at("env_seed"), "env_seed");
        if (es < 0) throw ConfigError("env_seed: must be non-negative");
        cfg.env_seed = static_cast<std::uint64_t>(es);
    }
    if (j.contains("threads")) {
        const std::int64_t th = as_int(j.at("threads"), "threads");
        if (th < 0) throw ConfigError("threads: must be non-negative");
        cfg.threads = static_cast<int>(th);
    }
    if (j.contains("output")) {
        const json& out = j.at("output");
        require_keys(out, "output", {}, {"per_round", "stride"});
        if (out.contains("per_round")) {
            if (!out.at("per_round").is_boolean())
                throw ConfigError("output.per_round: expected a boolean");
            cfg.per_round = out.at("per_round").get<bool>();
        }
        if (out.contains("stride")) {
            cfg.curve_stride = as_int(out.at("stride"), "output.stride");
            if (cfg.curve_stride < 0)
                throw ConfigError("output.stride: must be non-negative");
        }
    }
}

} // namespace

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

ExperimentConfig parse_experiment_config(const json& j,
                                         const std::string& base_dir) {
    require_keys(j, "config", {"model", "strategy", "stopping", "trials", "seed"},
                 {"env_seed", "threads", "output", "sweep"});
    ExperimentConfig cfg;
    cfg.stopping = parse_stopping(j.at("stopping"));
    cfg.model = parse_model(j.at("model"), base_dir, cfg.stopping);
    cfg.strategy = parse_strategy(j.at("strategy"));
    parse_common(j, cfg);
    return cfg;
}

std::vector<ExperimentConfig> expand_sweep(const json& j,
                                           const std::string& base_dir) {
    const ExperimentConfig base = parse_experiment_config(j, base_dir);
    if (!j.contains("sweep")) return {base};
    const json& sw = j.at("sweep");
    require_keys(sw, "sweep", {}, {"n", "strategies", "d"});

    std::vector<StrategySpec> strategies;
    if (sw.contains("strategies")) {
        const json& arr = sw.at("strategies");
        if (!arr.is_array() || arr.empty())
            throw ConfigError("sweep.strategies: expected a non-empty array");
        for (const auto& s : arr) strategies.push_back(parse_strategy(s));
    } else {
        strategies.push_back(base.strategy);
    }

    StoppingRule stopping = base.stopping;
    if (sw.contains("n")) {
        const json& arr = sw.at("n");
        if (!arr.is_array() || arr.empty())
            throw ConfigError("sweep.n: expected a non-empty array");
        if (j.at("model").at("type").get<std::string>() == "block")
            throw ConfigError(
                "sweep.n: block models fix their horizon at construction");
        ExplicitSchedule sched;
        for (const auto& n : arr) sched.ns.push_back(as_int(n, "sweep.n"));
        stopping = sched;
    }

    std::vector<std::int64_t> dims;
    if (sw.contains("d")) {
        const json& arr = sw.at("d");
        if (!arr.is_array() || arr.empty())
            throw ConfigError("sweep.d: expected a non-empty array");
        if (j.at("model").at("type").get<std::string>() != "hypercube")
            throw ConfigError("sweep.d: only hypercube models sweep dimension");
        if (j.at("model").contains("b"))
            throw ConfigError("sweep.d: drop model.b, the pattern depends on d");
        for (const auto& d : arr) dims.push_back(as_int(d, "sweep.d"));
    }

    std::vector<ExperimentConfig> grid;
    for (const StrategySpec& strat : strategies) {
        if (dims.empty()) {
            ExperimentConfig cfg = base;
            cfg.strategy = strat;
            cfg.stopping = stopping;
            grid.push_back(std::move(cfg));
            continue;
        }
        for (const std::int64_t d : dims) {
            ExperimentConfig cfg = base;
            cfg.strategy = strat;
            cfg.stopping = stopping;
            if (d < 1) throw ConfigError("sweep.d: must be positive");
            const double eps = as_double(j.at("model").at("eps"), "model.eps");
            cfg.model = make_hypercube_hard_instance(
                static_cast<std::size_t>(d), eps,
                std::vector<int>(static_cast<std::size_t>(d), 1));
            grid.push_back(std::move(cfg));
        }
    }
    return grid;
}

} // namespace lrb
