#include "lrb/algs.hpp"

#include <cmath>

#include "lrb/error.hpp"

namespace lrb {

namespace {

void check_weights(const Vector& p, std::size_t n_arms) {
    if (p.size() != n_arms)
        throw ParameterError("sampling weights: one weight per arm required");
    double sum = 0.0;
    for (double w : p) {
        if (!std::isfinite(w) || w < 0.0)
            throw ParameterError("sampling weights: negative or non-finite");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw ParameterError("sampling weights: must sum to 1");
}

std::size_t pick_weighted(const Vector& p, CounterRng& rng) {
    const double u = rng.next_unit();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return i;
    }
    return p.size() - 1;
}

} // namespace

std::size_t schedule_arm(const ArmSchedule& sched, std::int64_t t,
                         std::size_t n_arms, CounterRng& rng) {
    if (t < 1) throw ParameterError("schedule_arm: rounds are 1-based");
    if (n_arms == 0) throw ParameterError("schedule_arm: no arms");
    if (std::holds_alternative<UniformRoundRobin>(sched))
        return static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(n_arms));
    if (std::holds_alternative<UniformRandom>(sched))
        return static_cast<std::size_t>(rng.next_below(n_arms));
    if (std::holds_alternative<WeightedRandom>(sched)) {
        const auto& w = std::get<WeightedRandom>(sched);
        check_weights(w.p, n_arms);
        return pick_weighted(w.p, rng);
    }
    const auto& rr = std::get<SpannerRoundRobin>(sched);
    if (rr.indices.empty()) throw ParameterError("schedule_arm: empty basis");
    const std::size_t d = rr.indices.size();
    // positions cycle 1..d with round t, i.e. position (t-1) mod d
    const std::size_t pos = static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(d));
    const std::size_t arm = rr.indices[pos];
    if (arm >= n_arms) throw ParameterError("schedule_arm: basis arm out of range");
    return arm;
}

std::size_t argmax_lowest(const Vector& scores) {
    if (scores.empty()) throw ParameterError("argmax: empty scores");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

void EbaState::record(std::size_t arm, double reward) {
    if (arm >= sums.size()) throw ParameterError("record: arm out of range");
    sums[arm] += reward;
    counts[arm] += 1;
}

std::size_t eba_recommend(const EbaState& state) {
    Vector means(state.sums.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (state.counts[i] == 0)
            throw InsufficientDataError("eba_recommend: arm never pulled");
        means[i] = state.sums[i] / static_cast<double>(state.counts[i]);
    }
    return argmax_lowest(means);
}

Matrix sampling_design(const Matrix& U, const Vector& p) {
    check_weights(p, U.rows());
    const std::size_t d = U.cols();
    Matrix A(d, d, 0.0);
    for (std::size_t i = 0; i < U.rows(); ++i) {
        if (p[i] == 0.0) continue;
        for (std::size_t r = 0; r < d; ++r) {
            const double f = p[i] * U(i, r);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < d; ++c) A(r, c) += f * U(i, c);
        }
    }
    return A;
}

Vector estimate_seed(const Matrix& U, const Vector& p, std::size_t arm,
                     double reward) {
    if (arm >= U.rows()) throw ParameterError("estimate_seed: arm out of range");
    Matrix design_inv;
    try {
        design_inv = inv(sampling_design(U, p));
    } catch (const SingularError&) {
        throw EstimatorError(
            "estimate_seed: sampled rows do not span the feature space");
    }
    return estimate_seed_given(design_inv, U.row(arm), reward);
}

Vector estimate_seed_given(const Matrix& design_inv, const Vector& u_row,
                           double reward) {
    Vector scaled(u_row.size());
    for (std::size_t i = 0; i < u_row.size(); ++i) scaled[i] = u_row[i] * reward;
    return matvec(design_inv, scaled);
}

void SeedEstimatorState::observe(const Matrix& kernel, const Vector& vhat) {
    if (kernel.rows() != kernel_sum.rows() || kernel.cols() != kernel_sum.cols())
        throw DimensionError("observe: kernel shape changed");
    if (vhat.size() != vhat_sum.size())
        throw DimensionError("observe: estimate length changed");
    for (std::size_t i = 0; i < kernel_sum.data().size(); ++i)
        kernel_sum.data()[i] += kernel.data()[i];
    for (std::size_t i = 0; i < vhat_sum.size(); ++i) vhat_sum[i] += vhat[i];
    t += 1;
}

Vector seed_estimator_scores(const SeedEstimatorState& state) {
    if (state.t == 0)
        throw InsufficientDataError("seed_estimator: no rounds observed");
    const double scale = 1.0 / static_cast<double>(state.t);
    Matrix mean_kernel = state.kernel_sum;
    for (double& x : mean_kernel.data()) x *= scale;
    Vector mean_vhat = state.vhat_sum;
    for (double& x : mean_vhat) x *= scale;
    return matvec(mean_kernel, mean_vhat);
}

std::size_t seed_estimator_recommend(const SeedEstimatorState& state) {
    return argmax_lowest(seed_estimator_scores(state));
}

void SpannerRegressionState::record(std::size_t position, double reward) {
    if (position >= sums.size())
        throw ParameterError("record: basis position out of range");
    sums[position] += reward;
    counts[position] += 1;
}

Vector spanner_regression_scores(const Matrix& U,
                                 const SpannerRegressionState& state) {
    const std::size_t d = state.sums.size();
    Vector lhat(d);
    for (std::size_t j = 0; j < d; ++j) {
        if (state.counts[j] == 0)
            throw InsufficientDataError(
                "spanner_regression: basis arm never pulled");
        lhat[j] = state.sums[j] / static_cast<double>(state.counts[j]);
    }
    const Vector shat = matvec(state.basis.V_inv, lhat);
    return matvec(U, shat);
}

std::size_t spanner_regression_recommend(const Matrix& U,
                                         const SpannerRegressionState& state) {
    return argmax_lowest(spanner_regression_scores(U, state));
}

DesignDiagnostics design_diagnostics(const Matrix& U, const Vector& p,
                                     const std::vector<Vector>& domain_rows) {
    Matrix design_inv;
    const Matrix A = sampling_design(U, p);
    try {
        design_inv = inv(A);
    } catch (const SingularError&) {
        throw EstimatorError(
            "design_diagnostics: sampled rows do not span the feature space");
    }
    DesignDiagnostics out;
    out.lambda_min = smallest_eigenvalue_sym(A);
    if (domain_rows.empty())
        throw ParameterError("design_diagnostics: empty domain");
    std::vector<Vector> images;
    images.reserve(domain_rows.size());
    for (const Vector& b : domain_rows) images.push_back(matvec(design_inv, b));
    double alpha = -HUGE_VAL;
    for (const Vector& a : domain_rows)
        for (const Vector& y : images) alpha = std::max(alpha, dot(a, y));
    out.alpha = alpha;
    return out;
}

} // namespace lrb
