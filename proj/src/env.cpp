#include "lrb/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lrb/error.hpp"

namespace lrb {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kRewardSlack = 1e-9;
constexpr std::size_t kMaxCornerDim = 20;

std::size_t pick_index(const Vector& probs, CounterRng& rng) {
    const double u = rng.next_unit();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    return probs.size() - 1;
}

void check_probs(const Vector& probs, const char* what) {
    if (probs.empty()) throw ParameterError(std::string(what) + ": empty");
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0)
            throw ParameterError(std::string(what) + ": negative or non-finite mass");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kProbTol)
        throw ParameterError(std::string(what) + ": masses do not sum to 1");
}

void check_signed_pattern(const std::vector<int>& b, const char* what) {
    if (b.empty()) throw ParameterError(std::string(what) + ": empty sign pattern");
    for (int s : b)
        if (s != 1 && s != -1)
            throw ParameterError(std::string(what) + ": sign pattern entries must be +1 or -1");
}

void check_eps(double eps, const char* what) {
    if (!(eps > 0.0) || !(eps < 0.5))
        throw ParameterError(std::string(what) + ": eps must lie in (0, 1/2)");
}

} // namespace

// ---- seeds ------------------------------------------------------------------

std::size_t seed_dim(const SeedDistribution& s) {
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMassSeed>) return d.v.size();
            else if constexpr (std::is_same_v<T, UniformBoxSeed>) return d.lo.size();
            else if constexpr (std::is_same_v<T, FiniteSupportSeed>)
                return d.points.empty() ? 0 : d.points.front().size();
            else return d.b.size();
        },
        s);
}

Vector seed_mean(const SeedDistribution& s) {
    if (std::holds_alternative<PointMassSeed>(s))
        return std::get<PointMassSeed>(s).v;
    if (std::holds_alternative<UniformBoxSeed>(s)) {
        const auto& box = std::get<UniformBoxSeed>(s);
        Vector out(box.lo.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = 0.5 * (box.lo[i] + box.hi[i]);
        return out;
    }
    if (std::holds_alternative<FiniteSupportSeed>(s)) {
        const auto& fs = std::get<FiniteSupportSeed>(s);
        if (fs.points.empty()) throw ParameterError("seed_mean: empty support");
        Vector out(fs.points.front().size(), 0.0);
        for (std::size_t j = 0; j < fs.points.size(); ++j)
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += fs.probs[j] * fs.points[j][i];
        return out;
    }
    const auto& sb = std::get<SignedBasisSeed>(s);
    check_signed_pattern(sb.b, "signed basis");
    check_eps(sb.eps, "signed basis");
    const double d = static_cast<double>(sb.b.size());
    Vector out(sb.b.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<double>(sb.b[i]) * sb.eps / d;
    return out;
}

Vector sample_seed(const SeedDistribution& s, CounterRng& rng) {
    if (std::holds_alternative<PointMassSeed>(s))
        return std::get<PointMassSeed>(s).v;
    if (std::holds_alternative<UniformBoxSeed>(s)) {
        const auto& box = std::get<UniformBoxSeed>(s);
        Vector out(box.lo.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = rng.next_range(box.lo[i], box.hi[i]);
        return out;
    }
    if (std::holds_alternative<FiniteSupportSeed>(s)) {
        const auto& fs = std::get<FiniteSupportSeed>(s);
        return fs.points[pick_index(fs.probs, rng)];
    }
    const auto& sb = std::get<SignedBasisSeed>(s);
    const Vector probs = signed_basis_probs(sb.b, sb.eps);
    const std::size_t idx = pick_index(probs, rng);
    Vector out(sb.b.size(), 0.0);
    out[idx / 2] = (idx % 2 == 0) ? 1.0 : -1.0;
    return out;
}

std::vector<Vector> seed_extremes(const SeedDistribution& s) {
    if (std::holds_alternative<PointMassSeed>(s))
        return {std::get<PointMassSeed>(s).v};
    if (std::holds_alternative<UniformBoxSeed>(s)) {
        const auto& box = std::get<UniformBoxSeed>(s);
        const std::size_t d = box.lo.size();
        if (d > kMaxCornerDim)
            throw ParameterError("seed_extremes: box corner enumeration capped at 20 dims");
        std::vector<Vector> corners;
        corners.reserve(std::size_t{1} << d);
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            Vector c(d);
            for (std::size_t i = 0; i < d; ++i)
                c[i] = (mask >> i & 1U) ? box.hi[i] : box.lo[i];
            corners.push_back(std::move(c));
        }
        return corners;
    }
    if (std::holds_alternative<FiniteSupportSeed>(s))
        return std::get<FiniteSupportSeed>(s).points;
    const auto& sb = std::get<SignedBasisSeed>(s);
    std::vector<Vector> pts;
    pts.reserve(2 * sb.b.size());
    for (std::size_t i = 0; i < sb.b.size(); ++i) {
        Vector plus(sb.b.size(), 0.0), minus(sb.b.size(), 0.0);
        plus[i] = 1.0;
        minus[i] = -1.0;
        pts.push_back(std::move(plus));
        pts.push_back(std::move(minus));
    }
    return pts;
}

Vector signed_basis_probs(const std::vector<int>& b, double eps) {
    check_signed_pattern(b, "signed basis");
    check_eps(eps, "signed basis");
    const double two_d = 2.0 * static_cast<double>(b.size());
    Vector probs(2 * b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        probs[2 * i] = (1.0 + static_cast<double>(b[i]) * eps) / two_d;
        probs[2 * i + 1] = (1.0 - static_cast<double>(b[i]) * eps) / two_d;
    }
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) head += probs[i];
    probs.back() = 1.0 - head;
    return probs;
}

// ---- kernels ----------------------------------------------------------------

Matrix kernel_mean(const KernelDistribution& k) {
    if (std::holds_alternative<FixedKernel>(k))
        return std::get<FixedKernel>(k).U;
    const auto& fk = std::get<FiniteSupportKernel>(k);
    if (fk.mats.empty()) throw ParameterError("kernel_mean: empty support");
    Matrix out(fk.mats.front().rows(), fk.mats.front().cols(), 0.0);
    for (std::size_t j = 0; j < fk.mats.size(); ++j) {
        const Matrix& m = fk.mats[j];
        if (m.rows() != out.rows() || m.cols() != out.cols())
            throw DimensionError("kernel_mean: support shapes differ");
        for (std::size_t i = 0; i < out.data().size(); ++i)
            out.data()[i] += fk.probs[j] * m.data()[i];
    }
    return out;
}

const Matrix& sample_kernel(const KernelDistribution& k, CounterRng& rng) {
    if (std::holds_alternative<FixedKernel>(k))
        return std::get<FixedKernel>(k).U;
    const auto& fk = std::get<FiniteSupportKernel>(k);
    return fk.mats[pick_index(fk.probs, rng)];
}

std::vector<const Matrix*> kernel_support(const KernelDistribution& k) {
    if (std::holds_alternative<FixedKernel>(k))
        return {&std::get<FixedKernel>(k).U};
    std::vector<const Matrix*> out;
    for (const Matrix& m : std::get<FiniteSupportKernel>(k).mats) out.push_back(&m);
    return out;
}

bool kernel_is_fixed(const KernelDistribution& k) {
    return std::holds_alternative<FixedKernel>(k);
}

// ---- model ------------------------------------------------------------------

std::size_t RewardModel::num_arms() const {
    return kernel_support(kernel).front()->rows();
}

std::size_t RewardModel::dim() const {
    return kernel_support(kernel).front()->cols();
}

ValidationReport validate_model(const RewardModel& model) {
    ValidationReport rep;
    auto fail = [&rep](std::string msg) {
        rep.ok = false;
        rep.message = std::move(msg);
        return rep;
    };

    try {
        const auto mats = kernel_support(model.kernel);
        if (mats.empty() || mats.front()->rows() == 0 || mats.front()->cols() == 0)
            return fail("kernel has no arms or no features");
        const std::size_t n_arms = mats.front()->rows();
        const std::size_t d = mats.front()->cols();
        for (std::size_t k = 0; k < mats.size(); ++k) {
            if (mats[k]->rows() != n_arms || mats[k]->cols() != d)
                return fail("kernel support shapes differ");
            if (!all_finite(*mats[k]))
                return fail("kernel has non-finite entries");
        }
        if (std::holds_alternative<FiniteSupportKernel>(model.kernel))
            check_probs(std::get<FiniteSupportKernel>(model.kernel).probs,
                        "kernel masses");

        if (seed_dim(model.seed) != d)
            return fail("seed dimension does not match kernel columns");
        if (std::holds_alternative<UniformBoxSeed>(model.seed)) {
            const auto& box = std::get<UniformBoxSeed>(model.seed);
            if (box.lo.size() != box.hi.size())
                return fail("box bounds length mismatch");
            if (!all_finite(box.lo) || !all_finite(box.hi))
                return fail("box bounds not finite");
            for (std::size_t i = 0; i < box.lo.size(); ++i)
                if (box.lo[i] > box.hi[i])
                    return fail("box lower bound above upper bound");
        }
        if (std::holds_alternative<FiniteSupportSeed>(model.seed)) {
            const auto& fs = std::get<FiniteSupportSeed>(model.seed);
            if (fs.points.size() != fs.probs.size())
                return fail("seed support and masses length mismatch");
            for (const Vector& p : fs.points) {
                if (p.size() != d) return fail("seed support point dimension mismatch");
                if (!all_finite(p)) return fail("seed support point not finite");
            }
            check_probs(fs.probs, "seed masses");
        }
        if (std::holds_alternative<SignedBasisSeed>(model.seed)) {
            const auto& sb = std::get<SignedBasisSeed>(model.seed);
            check_signed_pattern(sb.b, "seed");
            check_eps(sb.eps, "seed");
        }

        const auto extremes = seed_extremes(model.seed);
        for (std::size_t k = 0; k < mats.size(); ++k) {
            for (std::size_t j = 0; j < extremes.size(); ++j) {
                const Vector x = matvec(*mats[k], extremes[j]);
                for (std::size_t arm = 0; arm < x.size(); ++arm) {
                    if (std::fabs(x[arm]) > 1.0 + kProbTol) {
                        rep.ok = false;
                        rep.kernel_index = k;
                        rep.seed_index = j;
                        rep.arm = arm;
                        rep.value = x[arm];
                        char buf[128];
                        std::snprintf(buf, sizeof buf,
                                      "reward out of range: kernel %zu, seed point %zu, "
                                      "arm %zu, value %.6g",
                                      k, j, arm, x[arm]);
                        rep.message = buf;
                        return rep;
                    }
                }
            }
        }
    } catch (const Error& e) {
        return fail(e.what());
    }
    return rep;
}

RoundSample sample_round(const RewardModel& model, CounterRng& rng) {
    RoundSample out;
    out.kernel = &sample_kernel(model.kernel, rng);
    out.seed = sample_seed(model.seed, rng);
    out.rewards = matvec(*out.kernel, out.seed);
    for (std::size_t arm = 0; arm < out.rewards.size(); ++arm) {
        if (std::fabs(out.rewards[arm]) > 1.0 + kRewardSlack) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "sampled reward out of range: arm %zu, value %.6g",
                          arm, out.rewards[arm]);
            throw ValidationError(buf);
        }
    }
    return out;
}

Vector true_means(const RewardModel& model) {
    return matvec(kernel_mean(model.kernel), seed_mean(model.seed));
}

double norm_pair_bound(const RewardModel& model) {
    double row_norm = 0.0;
    for (const Matrix* U : kernel_support(model.kernel)) {
        for (std::size_t r = 0; r < U->rows(); ++r) {
            double ss = 0.0;
            for (std::size_t c = 0; c < U->cols(); ++c) ss += (*U)(r, c) * (*U)(r, c);
            row_norm = std::max(row_norm, std::sqrt(ss));
        }
    }
    double seed_norm = 0.0;
    for (const Vector& v : seed_extremes(model.seed)) {
        double ss = 0.0;
        for (double x : v) ss += x * x;
        seed_norm = std::max(seed_norm, std::sqrt(ss));
    }
    return row_norm * seed_norm;
}

// ---- constructed instances ---------------------------------------------------

namespace {

// Rows of {-1, +1}^w in lexicographic order with -1 before +1.
Matrix sign_pattern_rows(std::size_t w, std::size_t tiles) {
    const std::size_t n_arms = std::size_t{1} << w;
    Matrix U(n_arms, w * tiles);
    for (std::size_t a = 0; a < n_arms; ++a)
        for (std::size_t t = 0; t < tiles; ++t)
            for (std::size_t j = 0; j < w; ++j)
                U(a, t * w + j) = (a >> (w - 1 - j) & 1U) ? 1.0 : -1.0;
    return U;
}

} // namespace

RewardModel make_hypercube_hard_instance(std::size_t d, double eps,
                                         const std::vector<int>& b) {
    if (d == 0 || d > 16)
        throw ParameterError("hypercube instance: d must lie in [1, 16]");
    check_eps(eps, "hypercube instance");
    if (b.size() != d)
        throw ParameterError("hypercube instance: sign pattern length must equal d");
    check_signed_pattern(b, "hypercube instance");
    RewardModel model;
    model.kernel = FixedKernel{sign_pattern_rows(d, 1)};
    model.seed = SignedBasisSeed{b, eps};
    return model;
}

const RewardModel& PhasedModel::at_round(std::int64_t t) const {
    if (t < 1) throw ParameterError("at_round: rounds are 1-based");
    std::size_t idx = static_cast<std::size_t>((t - 1) / phase_len);
    if (idx >= phases.size()) idx = phases.size() - 1;
    return phases[idx];
}

PhasedModel make_block_instance(std::size_t d, std::size_t k, double eps,
                                std::int64_t n,
                                const std::vector<std::vector<int>>& bs) {
    if (k == 0 || d == 0) throw ParameterError("block instance: d and k must be positive");
    if (k > 16) throw ParameterError("block instance: k must be at most 16");
    if (d % k != 0)
        throw ParameterError("block instance: d / k must be a positive integer");
    const std::size_t beta = d / k;
    if (bs.size() != beta)
        throw ParameterError("block instance: need one sign pattern per phase");
    check_eps(eps, "block instance");
    for (const auto& b : bs) {
        if (b.size() != k)
            throw ParameterError("block instance: sign pattern length must equal k");
        check_signed_pattern(b, "block instance");
    }
    if (n < 1) throw ParameterError("block instance: n must be positive");
    if (n % static_cast<std::int64_t>(beta) != 0)
        throw ParameterError("block instance: n must be divisible by the phase count");

    PhasedModel out;
    out.horizon = n;
    out.phase_len = n / static_cast<std::int64_t>(beta);
    const Matrix U = sign_pattern_rows(k, beta);
    for (std::size_t j = 0; j < beta; ++j) {
        const Vector probs = signed_basis_probs(bs[j], eps);
        FiniteSupportSeed seed;
        seed.probs = probs;
        seed.points.reserve(2 * k);
        for (std::size_t i = 0; i < k; ++i) {
            Vector plus(d, 0.0), minus(d, 0.0);
            plus[j * k + i] = 1.0;
            minus[j * k + i] = -1.0;
            seed.points.push_back(std::move(plus));
            seed.points.push_back(std::move(minus));
        }
        RewardModel phase;
        phase.kernel = FixedKernel{U};
        phase.seed = std::move(seed);
        out.phases.push_back(std::move(phase));
    }
    return out;
}

// ---- stopping ----------------------------------------------------------------

std::vector<std::int64_t> stopping_checkpoints(const StoppingRule& rule,
                                               CounterRng& rng) {
    if (std::holds_alternative<FixedHorizon>(rule)) {
        const auto n = std::get<FixedHorizon>(rule).n;
        if (n < 1) throw ParameterError("stopping: horizon must be at least 1");
        return {n};
    }
    if (std::holds_alternative<GeometricStopping>(rule)) {
        const double mean_n = std::get<GeometricStopping>(rule).mean_n;
        if (!(mean_n >= 1.0))
            throw ParameterError("stopping: geometric mean must be at least 1");
        const double p = 1.0 / mean_n;
        if (p >= 1.0) return {1};
        const double u = rng.next_unit();
        const double draw = 1.0 + std::floor(std::log1p(-u) / std::log1p(-p));
        return {std::max<std::int64_t>(1, static_cast<std::int64_t>(draw))};
    }
    auto ns = std::get<ExplicitSchedule>(rule).ns;
    if (ns.empty()) throw ParameterError("stopping: empty schedule");
    for (auto n : ns)
        if (n < 1) throw ParameterError("stopping: horizons must be at least 1");
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
}

// ---- CSV ----------------------------------------------------------------------

Matrix load_kernel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel file: " + path);
    std::vector<Vector> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        Vector row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const char* begin = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            while (end && *end == ' ') ++end;
            if (end == begin || (end && *end != '\0' && *end != '\r'))
                throw ConfigError("kernel file " + path + ": bad number at line " +
                                  std::to_string(lineno));
            row.push_back(v);
        }
        if (row.empty())
            throw ConfigError("kernel file " + path + ": empty row at line " +
                              std::to_string(lineno));
        if (!all_finite(row))
            throw ConfigError("kernel file " + path + ": non-finite value at line " +
                              std::to_string(lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError("kernel file " + path + ": ragged row at line " +
                              std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("kernel file " + path + ": no data rows");
    return Matrix::from_rows(rows);
}

} // namespace lrb
