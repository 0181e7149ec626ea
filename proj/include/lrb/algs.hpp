#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "lrb/matrix.hpp"
#include "lrb/rng.hpp"
#include "lrb/spanner.hpp"

namespace lrb {

// ---- arm schedules ----------------------------------------------------------
// A schedule maps the round index (and nothing else; rewards never reach it)
// to an arm. That keeps every sampler oblivious by construction.

struct UniformRoundRobin {};
struct UniformRandom {};
struct WeightedRandom {
    Vector p; // one weight per arm, sums to 1
};
struct SpannerRoundRobin {
    std::vector<std::size_t> indices; // basis arms, cycled in order
};

using ArmSchedule =
    std::variant<UniformRoundRobin, UniformRandom, WeightedRandom, SpannerRoundRobin>;

// t is 1-based. Deterministic schedules ignore rng.
std::size_t schedule_arm(const ArmSchedule& sched, std::int64_t t,
                         std::size_t n_arms, CounterRng& rng);

// Argmax with ties resolved to the lowest index, so reordering equal scores
// never changes the recommendation.
std::size_t argmax_lowest(const Vector& scores);

// ---- empirical best arm -----------------------------------------------------

struct EbaState {
    Vector sums;
    std::vector<std::int64_t> counts;

    explicit EbaState(std::size_t n_arms)
        : sums(n_arms, 0.0), counts(n_arms, 0) {}

    void record(std::size_t arm, double reward);
};

// Highest empirical mean. Every arm must have been pulled at least once.
std::size_t eba_recommend(const EbaState& state);

// ---- seed estimation ---------------------------------------------------------

// A = sum_i p(i) u_i^T u_i, the d x d second-moment matrix of the rows
// under the sampling weights.
Matrix sampling_design(const Matrix& U, const Vector& p);

// One-round unbiased seed estimate A^{-1} u_I^T x(I). Raises EstimatorError
// when the sampled rows do not excite every direction (singular A).
Vector estimate_seed(const Matrix& U, const Vector& p, std::size_t arm,
                     double reward);

// Fast path when A^{-1} is already known.
Vector estimate_seed_given(const Matrix& design_inv, const Vector& u_row,
                           double reward);

// Running sums for the stochastic-kernel recommender.
struct SeedEstimatorState {
    std::int64_t t = 0;
    Matrix kernel_sum; // N x d
    Vector vhat_sum;   // d

    SeedEstimatorState(std::size_t n_arms, std::size_t d)
        : kernel_sum(n_arms, d, 0.0), vhat_sum(d, 0.0) {}

    void observe(const Matrix& kernel, const Vector& vhat);
};

// Scores are (mean kernel so far) times (mean seed estimate so far).
Vector seed_estimator_scores(const SeedEstimatorState& state);
std::size_t seed_estimator_recommend(const SeedEstimatorState& state);

// ---- spanner regression ------------------------------------------------------

// Per-basis-arm reward averages; the seed is recovered by solving V s = lhat.
struct SpannerRegressionState {
    SpannerBasis basis;
    Vector sums;
    std::vector<std::int64_t> counts;

    explicit SpannerRegressionState(SpannerBasis b)
        : basis(std::move(b)),
          sums(basis.indices.size(), 0.0),
          counts(basis.indices.size(), 0) {}

    void record(std::size_t position, double reward);
};

Vector spanner_regression_scores(const Matrix& U,
                                 const SpannerRegressionState& state);
std::size_t spanner_regression_recommend(const Matrix& U,
                                         const SpannerRegressionState& state);

// ---- diagnostics --------------------------------------------------------------

struct DesignDiagnostics {
    double alpha = 0.0;      // max over row pairs of a^T A^{-1} b
    double lambda_min = 0.0; // smallest eigenvalue of A
};

DesignDiagnostics design_diagnostics(const Matrix& U, const Vector& p,
                                     const std::vector<Vector>& domain_rows);

} // namespace lrb
