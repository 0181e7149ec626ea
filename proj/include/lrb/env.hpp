#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lrb/matrix.hpp"
#include "lrb/rng.hpp"

namespace lrb {

class CounterRng;

// ---- seed (latent factor) distributions ----------------------------------

struct PointMassSeed {
    Vector v;
};

// Independent uniform draw per coordinate from [lo(i), hi(i)].
struct UniformBoxSeed {
    Vector lo;
    Vector hi;
};

struct FiniteSupportSeed {
    std::vector<Vector> points;
    Vector probs;
};

// Support {+e_i, -e_i}, i = 1..d. Coordinate i carries mass
// (1 + b(i) eps) / (2d) on +e_i and (1 - b(i) eps) / (2d) on -e_i,
// so the mean is b(i) eps / d.
struct SignedBasisSeed {
    std::vector<int> b; // entries +1 or -1
    double eps = 0.0;
};

using SeedDistribution =
    std::variant<PointMassSeed, UniformBoxSeed, FiniteSupportSeed, SignedBasisSeed>;

std::size_t seed_dim(const SeedDistribution& s);
Vector seed_mean(const SeedDistribution& s);
Vector sample_seed(const SeedDistribution& s, CounterRng& rng);

// Extreme points that bound every realization: the support itself for the
// discrete laws, the 2^d corners for a box. Reward-range checks over these
// points cover the whole distribution because U v is linear in v.
std::vector<Vector> seed_extremes(const SeedDistribution& s);

// Probability table for SignedBasisSeed in support order
// (+e_1, -e_1, +e_2, -e_2, ...). The last mass is assigned as one minus the
// sum of the rest, which keeps the left-to-right total at exactly 1.0; the
// adjustment is at most one ulp.
Vector signed_basis_probs(const std::vector<int>& b, double eps);

// ---- kernel (arm feature matrix) distributions ----------------------------

struct FixedKernel {
    Matrix U;
};

struct FiniteSupportKernel {
    std::vector<Matrix> mats;
    Vector probs;
};

using KernelDistribution = std::variant<FixedKernel, FiniteSupportKernel>;

Matrix kernel_mean(const KernelDistribution& k);
const Matrix& sample_kernel(const KernelDistribution& k, CounterRng& rng);
std::vector<const Matrix*> kernel_support(const KernelDistribution& k);
bool kernel_is_fixed(const KernelDistribution& k);

// ---- reward model ----------------------------------------------------------

struct RewardModel {
    KernelDistribution kernel;
    SeedDistribution seed;

    std::size_t num_arms() const;
    std::size_t dim() const;
};

struct ValidationReport {
    bool ok = true;
    std::string message; // empty when ok
    std::size_t kernel_index = 0;
    std::size_t seed_index = 0;
    std::size_t arm = 0;
    double value = 0.0;
};

// Checks shapes, distribution parameters, and that every kernel support
// point paired with every seed extreme keeps rewards inside [-1, 1].
ValidationReport validate_model(const RewardModel& model);

struct RoundSample {
    const Matrix* kernel = nullptr; // realized U_t, owned by the model
    Vector seed;                    // realized v_t
    Vector rewards;                 // x_t = U_t v_t, one entry per arm
};

// Draws one round. Raises ValidationError if the sampled reward vector
// escapes [-1, 1]^N; validate_model should have excluded that.
RoundSample sample_round(const RewardModel& model, CounterRng& rng);

// Mean rewards under the mean kernel and mean seed.
Vector true_means(const RewardModel& model);

// Product of the largest row 2-norm over the kernel support and the largest
// 2-norm over the seed extremes. Reported as a diagnostic only.
double norm_pair_bound(const RewardModel& model);

// ---- constructed instances -------------------------------------------------

// N = 2^d arms, one per sign pattern in lexicographic order (-1 before +1).
// Seed is SignedBasisSeed(b, eps). The unique best arm is the row equal to b,
// its mean is eps, and the runner-up gap is 2 eps / d.
RewardModel make_hypercube_hard_instance(std::size_t d, double eps,
                                         const std::vector<int>& b);

// Piecewise-constant model: the kernel is shared, the seed law switches at
// phase boundaries. Consumed by the harness round loop; algorithms just see
// one more stochastic environment.
struct PhasedModel {
    std::vector<RewardModel> phases;
    std::int64_t phase_len = 0;
    std::int64_t horizon = 0;

    const RewardModel& at_round(std::int64_t t) const; // t is 1-based
};

// beta = d / k phases of n / beta rounds each. Phase j carries a k-dim
// signed-basis seed embedded in coordinates [j k, (j+1) k), zero elsewhere.
// Arms are the 2^k sign patterns tiled across all beta blocks, so with
// k = d this is exactly the hypercube instance.
PhasedModel make_block_instance(std::size_t d, std::size_t k, double eps,
                                std::int64_t n,
                                const std::vector<std::vector<int>>& bs);

// ---- stopping rules ---------------------------------------------------------

struct FixedHorizon {
    std::int64_t n = 0;
};

// Horizon drawn once per trial; P(n = t) = (1-p)^(t-1) p with p = 1/mean_n.
struct GeometricStopping {
    double mean_n = 0.0;
};

// Evaluation points for sweeps; a single trial reports at every listed n.
struct ExplicitSchedule {
    std::vector<std::int64_t> ns;
};

using StoppingRule = std::variant<FixedHorizon, GeometricStopping, ExplicitSchedule>;

// Sorted distinct evaluation horizons for one trial. Geometric rules draw
// from rng; the others ignore it.
std::vector<std::int64_t> stopping_checkpoints(const StoppingRule& rule,
                                               CounterRng& rng);

// ---- kernel matrices from disk ----------------------------------------------

// One arm per line, d comma-separated reals, optional leading '#' header.
Matrix load_kernel_csv(const std::string& path);

} // namespace lrb
