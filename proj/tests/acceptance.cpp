// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances and runtime budgets are pinned here on purpose.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lrb/algs.hpp"
#include "lrb/cli.hpp"
#include "lrb/env.hpp"
#include "lrb/error.hpp"
#include "lrb/harness.hpp"
#include "lrb/matrix.hpp"
#include "lrb/rng.hpp"
#include "lrb/spanner.hpp"
#include "support/oracles.hpp"

using lrb::Matrix;
using lrb::Vector;

namespace {

namespace fs = std::filesystem;

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Matrix random_matrix(lrb::CounterRng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& x : m.data()) x = rng.next_range(-1.0, 1.0);
    return m;
}

Vector random_weights(lrb::CounterRng& rng, std::size_t n) {
    Vector p(n);
    double sum = 0.0;
    for (double& w : p) {
        w = 0.05 + rng.next_unit();
        sum += w;
    }
    for (double& w : p) w /= sum;
    p.back() = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) p.back() -= p[i];
    return p;
}

// 1. Weighting each arm's one-round estimate by its sampling probability
//    returns the seed exactly, for any instance with an invertible design.
Outcome exact_unbiasedness() {
    Outcome out;
    lrb::CounterRng rng(101, 0);
    int done = 0;
    int guard = 0;
    while (done < 100 && ++guard < 1000) {
        const std::size_t d = 1 + rng.next_below(4);
        const std::size_t n = d + rng.next_below(17 - d);
        const Matrix U = random_matrix(rng, n, d);
        const Vector p = random_weights(rng, n);
        Vector v(d);
        for (double& x : v) x = rng.next_range(-1.0, 1.0);

        Vector acc(d, 0.0);
        try {
            for (std::size_t arm = 0; arm < n; ++arm) {
                const double reward = lrb::dot(U.row(arm), v);
                const Vector vhat = lrb::estimate_seed(U, p, arm, reward);
                for (std::size_t c = 0; c < d; ++c) acc[c] += p[arm] * vhat[c];
            }
        } catch (const lrb::EstimatorError&) {
            continue; // singular draw, take another instance
        }
        for (std::size_t c = 0; c < d; ++c) {
            if (std::fabs(acc[c] - v[c]) > 1e-10) {
                out.fail("instance " + std::to_string(done) + " coordinate " +
                         std::to_string(c) + " off by " +
                         fmt(std::fabs(acc[c] - v[c])));
                return out;
            }
        }
        ++done;
    }
    if (done < 100) out.fail("could not draw 100 invertible instances");
    return out;
}

// 2. Monte Carlo mean of the one-round estimates converges on the mean seed.
Outcome monte_carlo_unbiasedness() {
    Outcome out;
    Matrix U(8, 3);
    for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t c = 0; c < 3; ++c) U(a, c) = (a >> (2 - c)) & 1U ? 1.0 : 0.0;
    const Vector center{0.25, -0.15, 0.10};
    const double half = 0.10;
    const Vector p(8, 0.125);
    const Matrix design_inv = lrb::inv(lrb::sampling_design(U, p));

    lrb::CounterRng sampler(202, 0);
    lrb::CounterRng env(202, 1);
    const int rounds = 100000;
    Vector sum(3, 0.0), sumsq(3, 0.0);
    for (int t = 0; t < rounds; ++t) {
        Vector v(3);
        for (std::size_t c = 0; c < 3; ++c)
            v[c] = env.next_range(center[c] - half, center[c] + half);
        const std::size_t arm = sampler.next_below(8);
        const double x = lrb::dot(U.row(arm), v);
        const Vector vhat = lrb::estimate_seed_given(design_inv, U.row(arm), x);
        for (std::size_t c = 0; c < 3; ++c) {
            sum[c] += vhat[c];
            sumsq[c] += vhat[c] * vhat[c];
        }
    }
    for (std::size_t c = 0; c < 3; ++c) {
        const double mean = sum[c] / rounds;
        const double var = (sumsq[c] - rounds * mean * mean) / (rounds - 1);
        const double se = std::sqrt(var / rounds);
        const double dev = std::fabs(mean - center[c]);
        if (dev > 3.0 * se)
            out.fail("coordinate " + std::to_string(c) + ": deviation " + fmt(dev) +
                     " exceeds 3 x " + fmt(se));
    }
    return out;
}

// 3. The exhaustive spanner search attains the best subset volume found by an
//    independent oracle, with coefficients no larger than 1.
Outcome spanner_vs_brute_force() {
    Outcome out;
    lrb::CounterRng rng(303, 0);
    int done = 0;
    int guard = 0;
    while (done < 50 && ++guard < 500) {
        const std::size_t d = 1 + rng.next_below(3);
        const std::size_t n = d + 1 + rng.next_below(10 - d);
        const Matrix U = random_matrix(rng, n, d);
        const auto ref = oracle::brute_best_subset(U);
        if (ref.absdet < 1e-9) continue;
        const auto basis = lrb::exact_spanner(U);
        const double got = std::fabs(lrb::det(basis.V));
        if (std::fabs(got - ref.absdet) > 1e-10 * ref.absdet) {
            out.fail("instance " + std::to_string(done) + ": |det| " + fmt(got) +
                     " vs oracle " + fmt(ref.absdet));
            return out;
        }
        const Matrix W = lrb::coefficients(U, basis);
        for (double w : W.data())
            if (std::fabs(w) > 1.0 + 1e-9) {
                out.fail("instance " + std::to_string(done) +
                         ": coefficient " + fmt(w));
                return out;
            }
        ++done;
    }
    if (done < 50) out.fail("could not draw 50 well-posed instances");
    return out;
}

// 4. The swap search always terminates with coefficients inside [-C, C].
Outcome approx_spanner_contract() {
    Outcome out;
    lrb::CounterRng rng(404, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix U = random_matrix(rng, 50, 4);
        const auto basis = lrb::approx_spanner(U, 2.0);
        auto sorted = basis.indices;
        std::sort(sorted.begin(), sorted.end());
        if (std::unique(sorted.begin(), sorted.end()) != sorted.end() ||
            sorted.size() != 4) {
            out.fail("instance " + std::to_string(rep) + ": degenerate basis");
            return out;
        }
        const Matrix W = lrb::coefficients(U, basis);
        for (double w : W.data())
            if (std::fabs(w) > 2.0 + 1e-9) {
                out.fail("instance " + std::to_string(rep) + ": coefficient " +
                         fmt(w));
                return out;
            }
    }
    return out;
}

// 5. With a square kernel the regression basis is the whole kernel, so its
//    recommendation must match the empirical best arm at every prefix.
Outcome square_kernel_reduction() {
    Outcome out;
    lrb::CounterRng meta(505, 0);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 2 + meta.next_below(5); // d = N in 2..6
        Matrix U(n, n);
        do {
            for (double& x : U.data()) x = meta.next_range(-1.0, 1.0);
        } while (std::fabs(lrb::det(U)) < 0.05);
        const auto basis = lrb::exact_spanner(U);
        for (std::size_t j = 0; j < n; ++j)
            if (basis.indices[j] != j) {
                out.fail("square kernel basis is not the identity subset");
                return out;
            }
        for (std::uint64_t stream = 0; stream < 20; ++stream) {
            lrb::CounterRng rs(506, std::uint64_t(inst) * 32 + stream);
            lrb::EbaState eba(n);
            lrb::SpannerRegressionState reg(basis);
            for (std::int64_t t = 1; t <= 60; ++t) {
                const std::size_t arm = std::size_t((t - 1) % n);
                const double x = rs.next_range(-1.0, 1.0);
                eba.record(arm, x);
                reg.record(arm, x);
                if (t < static_cast<std::int64_t>(n)) continue;
                const std::size_t a = lrb::eba_recommend(eba);
                const std::size_t b = lrb::spanner_regression_recommend(U, reg);
                if (a != b) {
                    out.fail("instance " + std::to_string(inst) + " stream " +
                             std::to_string(stream) + " round " +
                             std::to_string(t) + ": " + std::to_string(a) +
                             " vs " + std::to_string(b));
                    return out;
                }
            }
        }
    }
    return out;
}

// Fixed 64-arm rank-4 instance shared by the rate and advantage checks.
// True means under the mean seed descend in equal steps of 5e-4, so the
// instance stays noise limited over the whole n grid instead of being
// solved outright; the off-axis row components are random.
lrb::RewardModel rate_check_model() {
    lrb::CounterRng rng(606, 0);
    const Vector center{0.05, -0.03, 0.02, 0.04};
    const double half = 0.18;
    const double top_mean = 0.048;
    const double step = 3.2e-4;

    double cn = std::sqrt(lrb::dot(center, center));
    std::vector<Vector> q;
    q.push_back(center);
    for (double& x : q[0]) x /= cn;
    for (std::size_t axis = 0; axis < 4 && q.size() < 4; ++axis) {
        Vector w(4, 0.0);
        w[axis] = 1.0;
        for (const Vector& prev : q) {
            const double proj = lrb::dot(w, prev);
            for (std::size_t j = 0; j < 4; ++j) w[j] -= proj * prev[j];
        }
        const double nw = std::sqrt(lrb::dot(w, w));
        if (nw < 1e-8) continue;
        for (double& x : w) x /= nw;
        q.push_back(std::move(w));
    }

    Matrix U(64, 4);
    for (std::size_t k = 0; k < 64; ++k) {
        const double a = (top_mean - step * double(k)) / cn;
        for (;;) {
            Vector u(4);
            for (std::size_t j = 0; j < 4; ++j) u[j] = a * q[0][j];
            for (std::size_t m = 1; m < 4; ++m) {
                const double rho = rng.next_range(-0.45, 0.45);
                for (std::size_t j = 0; j < 4; ++j) u[j] += rho * q[m][j];
            }
            double worst = 0.0;
            for (double x : u) worst = std::max(worst, std::fabs(x));
            if (worst > 0.95) continue;
            for (std::size_t j = 0; j < 4; ++j) U(k, j) = u[j];
            break;
        }
    }

    Vector lo(4), hi(4);
    for (std::size_t c = 0; c < 4; ++c) {
        lo[c] = center[c] - half;
        hi[c] = center[c] + half;
    }
    lrb::RewardModel model;
    model.kernel = lrb::FixedKernel{std::move(U)};
    model.seed = lrb::UniformBoxSeed{lo, hi};
    return model;
}

// 6. Mean regret of the regression strategy falls like a power of n with
//    exponent near -1/2.
Outcome root_n_rate() {
    Outcome out;
    lrb::ExperimentConfig cfg;
    cfg.model = rate_check_model();
    cfg.strategy.kind = lrb::StrategyKind::SpannerRegression;
    cfg.strategy.label = "spanner_regression";
    cfg.stopping = lrb::ExplicitSchedule{{1000, 4000, 16000}};
    cfg.trials = 400;
    cfg.base_seed = 606;
    const auto mc = lrb::run_monte_carlo(cfg);
    std::vector<std::pair<double, double>> pts;
    std::string means;
    for (const auto& row : mc.rows) {
        pts.emplace_back(double(row.n), row.mean);
        if (!means.empty()) means += ", ";
        means += "n=" + std::to_string(row.n) + " mean=" + fmt(row.mean);
    }
    const auto slope = lrb::fit_loglog_slope(pts);
    if (!slope) {
        out.fail("slope undefined (" + means + ")");
        return out;
    }
    out.note("slope " + fmt(*slope));
    if (!(*slope >= -0.75 && *slope <= -0.30))
        out.fail("slope " + fmt(*slope) + " outside [-0.75, -0.30] (" + means + ")");
    return out;
}

// 7. At n = 2000 the rank-aware strategy beats the uniform baseline by more
//    than twice the larger standard error.
Outcome low_rank_advantage() {
    Outcome out;
    lrb::ExperimentConfig cfg;
    cfg.model = rate_check_model();
    cfg.stopping = lrb::FixedHorizon{2000};
    cfg.trials = 400;
    cfg.base_seed = 707;

    cfg.strategy.kind = lrb::StrategyKind::SpannerRegression;
    cfg.strategy.label = "spanner_regression";
    const auto reg = lrb::run_monte_carlo(cfg).rows[0];

    cfg.strategy = lrb::StrategySpec{};
    const auto eba = lrb::run_monte_carlo(cfg).rows[0];

    out.note("regression " + fmt(reg.mean) + " +- " + fmt(reg.se) + ", baseline " +
             fmt(eba.mean) + " +- " + fmt(eba.se));
    const double gap = eba.mean - reg.mean;
    if (!(reg.mean < eba.mean)) out.fail("regression did not beat the baseline");
    if (!(gap > 2.0 * std::max(reg.se, eba.se)))
        out.fail("gap " + fmt(gap) + " within noise");
    return out;
}

// 8. The sign-pattern hard instance has exactly the promised structure.
Outcome hard_instance_invariants() {
    Outcome out;
    lrb::CounterRng rng(808, 0);
    const double eps = 0.2;
    for (std::size_t d : {2u, 3u, 4u}) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<int> b(d);
            for (int& s : b) s = rng.next_unit() < 0.5 ? -1 : 1;

            const Vector probs = lrb::signed_basis_probs(b, eps);
            double sum = 0.0;
            for (double q : probs) sum += q;
            if (sum != 1.0) {
                out.fail("d=" + std::to_string(d) + ": probabilities sum to " +
                         fmt(sum));
                return out;
            }
            for (std::size_t i = 0; i < d; ++i) {
                const double mean_i = probs[2 * i] - probs[2 * i + 1];
                if (std::fabs(mean_i - b[i] * eps / double(d)) > 1e-12) {
                    out.fail("d=" + std::to_string(d) + ": mean seed coordinate " +
                             std::to_string(i) + " off");
                    return out;
                }
            }

            const auto model = lrb::make_hypercube_hard_instance(d, eps, b);
            const Vector mu = lrb::true_means(model);
            std::size_t b_index = 0;
            for (std::size_t j = 0; j < d; ++j)
                if (b[j] == 1) b_index |= std::size_t{1} << (d - 1 - j);
            const std::size_t best = lrb::argmax_lowest(mu);
            if (best != b_index) {
                out.fail("d=" + std::to_string(d) + ": best arm " +
                         std::to_string(best) + " is not the pattern row " +
                         std::to_string(b_index));
                return out;
            }
            double second = -2.0;
            for (std::size_t a = 0; a < mu.size(); ++a)
                if (a != best) second = std::max(second, mu[a]);
            if (std::fabs((mu[best] - second) - 2.0 * eps / double(d)) > 1e-12) {
                out.fail("d=" + std::to_string(d) + ": runner-up gap " +
                         fmt(mu[best] - second));
                return out;
            }
        }
    }
    return out;
}

// 9. Replaying a trial against fresh reward draws never changes the arms.
Outcome oblivious_arm_sequences() {
    Outcome out;
    std::vector<lrb::ModelSpec> instances;
    lrb::CounterRng rng(909, 0);
    instances.push_back(lrb::make_hypercube_hard_instance(2, 0.2, {1, -1}));
    instances.push_back(lrb::make_hypercube_hard_instance(3, 0.3, {1, 1, -1}));
    instances.push_back(lrb::make_hypercube_hard_instance(4, 0.1, {-1, 1, -1, 1}));
    {
        lrb::RewardModel phase_a;
        phase_a.kernel = lrb::FixedKernel{
            Matrix::from_rows({{1, 0}, {0, 1}, {0.5, 0.5}, {-0.5, 0.25}})};
        phase_a.seed = lrb::UniformBoxSeed{{0.0, -0.2}, {0.4, 0.2}};
        lrb::RewardModel phase_b = phase_a;
        phase_b.seed = lrb::UniformBoxSeed{{-0.4, -0.1}, {0.0, 0.3}};
        lrb::PhasedModel pm;
        pm.phases = {phase_a, phase_b};
        pm.phase_len = 20;
        pm.horizon = 40;
        instances.push_back(std::move(pm));
    }
    for (int rep = 0; rep < 6; ++rep) {
        const std::size_t d = 2 + rng.next_below(3);
        lrb::RewardModel m;
        m.kernel = lrb::FixedKernel{random_matrix(rng, 6 + d, d)};
        Vector lo(d, -0.4 / double(d)), hi(d, 0.4 / double(d));
        m.seed = lrb::UniformBoxSeed{lo, hi};
        instances.push_back(std::move(m));
    }

    const lrb::StrategyKind kinds[] = {lrb::StrategyKind::UniformEba,
                                       lrb::StrategyKind::SeedEstimator,
                                       lrb::StrategyKind::SpannerRegression};
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (const auto kind : kinds) {
            lrb::ExperimentConfig cfg;
            cfg.model = instances[i];
            cfg.strategy.kind = kind;
            cfg.stopping = lrb::FixedHorizon{40};
            cfg.base_seed = 42;
            lrb::ExperimentConfig alt = cfg;
            cfg.env_seed = 11111;
            alt.env_seed = 22222;
            for (std::int64_t trial = 0; trial < 2; ++trial) {
                const auto ra = lrb::run_trial(cfg, trial);
                const auto rb = lrb::run_trial(alt, trial);
                if (ra.arm_hash != rb.arm_hash) {
                    out.fail("instance " + std::to_string(i) + " strategy " +
                             std::to_string(int(kind)) + " trial " +
                             std::to_string(trial) + ": arm hash changed");
                    return out;
                }
            }
        }
    }
    return out;
}

// 10. The batch runner is reproducible byte for byte, and thread count never
//     changes the numbers.
Outcome byte_identical_reruns() {
    Outcome out;
    const fs::path root = fs::temp_directory_path() / "lrb_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg_path = root / "cfg.json";
    {
        std::ofstream f(cfg_path);
        f << "{\n"
          << "  \"model\": {\"type\": \"hypercube\", \"d\": 3, \"eps\": 0.2},\n"
          << "  \"strategy\": {\"name\": \"seed_estimator\"},\n"
          << "  \"stopping\": {\"type\": \"fixed\", \"n\": 400},\n"
          << "  \"trials\": 64,\n"
          << "  \"seed\": 99\n"
          << "}\n";
    }
    auto read_file = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    auto run_into = [&](const char* sub, const char* threads) {
        std::vector<std::string> args{"run", "--config", cfg_path.string(),
                                      "--out", (root / sub).string()};
        if (threads) {
            args.push_back("--threads");
            args.push_back(threads);
        }
        return lrb::cli_execute(args);
    };
    if (run_into("a", nullptr) != 0 || run_into("b", nullptr) != 0 ||
        run_into("t1", "1") != 0 || run_into("t8", "8") != 0) {
        out.fail("runner returned a nonzero exit code");
        fs::remove_all(root);
        return out;
    }
    const std::string a = read_file(root / "a" / "results.csv");
    if (a.empty()) out.fail("empty results");
    if (a != read_file(root / "b" / "results.csv"))
        out.fail("rerun differs byte for byte");
    if (a != read_file(root / "t1" / "results.csv"))
        out.fail("single-thread run differs");
    if (a != read_file(root / "t8" / "results.csv"))
        out.fail("eight-thread run differs");
    fs::remove_all(root);
    return out;
}

int failures = 0;

void run_criterion(int num, const char* name, double budget_s,
                   Outcome (*fn)()) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out.fail(std::string("unexpected error: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (elapsed >= budget_s)
        out.fail("runtime " + fmt(elapsed) + "s over the " + fmt(budget_s) +
                 "s budget");
    std::printf("[%s] %2d. %s (%.2fs)%s%s\n", out.ok ? "PASS" : "FAIL", num, name,
                elapsed, out.detail.empty() ? "" : " - ", out.detail.c_str());
    if (!out.ok) ++failures;
}

} // namespace

int main() {
    run_criterion(1, "seed estimate unbiased under exact enumeration", 1.0,
                  exact_unbiasedness);
    run_criterion(2, "seed estimate unbiased in Monte Carlo", 10.0,
                  monte_carlo_unbiasedness);
    run_criterion(3, "exact spanner matches exhaustive search", 5.0,
                  spanner_vs_brute_force);
    run_criterion(4, "approximate spanner respects its coefficient bound", 10.0,
                  approx_spanner_contract);
    run_criterion(5, "square-kernel regression equals empirical best arm", 30.0,
                  square_kernel_reduction);
    run_criterion(6, "mean regret falls at a root-n rate", 120.0, root_n_rate);
    run_criterion(7, "rank-aware strategy beats the uniform baseline", 60.0,
                  low_rank_advantage);
    run_criterion(8, "hard instance matches its analytic structure", 5.0,
                  hard_instance_invariants);
    run_criterion(9, "arm sequences are oblivious to rewards", 30.0,
                  oblivious_arm_sequences);
    run_criterion(10, "byte-identical reruns at any thread count", 60.0,
                  byte_identical_reruns);

    if (failures == 0) {
        std::printf("all 10 criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
