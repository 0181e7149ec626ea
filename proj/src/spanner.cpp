#include "lrb/spanner.hpp"

#include <algorithm>
#include <cmath>

#include "lrb/error.hpp"

namespace lrb {

namespace {

constexpr double kPivotRelTol = 1e-12;

// Full-rank subset by greedy pivoting: at each elimination step take the arm
// whose reduced row has the largest magnitude entry. O(N d^2).
std::vector<std::size_t> greedy_full_rank_subset(const Matrix& U) {
    const std::size_t n_arms = U.rows();
    const std::size_t d = U.cols();
    if (n_arms < d) throw RankError("spanner: fewer arms than dimensions");

    Matrix work = U;
    std::vector<bool> used(n_arms, false);
    std::vector<std::size_t> chosen;
    double max_piv = 0.0;
    for (std::size_t step = 0; step < d; ++step) {
        std::size_t best_arm = n_arms;
        std::size_t best_col = 0;
        double best = 0.0;
        for (std::size_t a = 0; a < n_arms; ++a) {
            if (used[a]) continue;
            for (std::size_t c = 0; c < d; ++c) {
                const double mag = std::fabs(work(a, c));
                if (mag > best) {
                    best = mag;
                    best_arm = a;
                    best_col = c;
                }
            }
        }
        max_piv = std::max(max_piv, best);
        if (best_arm == n_arms || best == 0.0 || best < kPivotRelTol * max_piv)
            throw RankError("spanner: kernel rows do not span the feature space");
        used[best_arm] = true;
        chosen.push_back(best_arm);
        const double p = work(best_arm, best_col);
        for (std::size_t a = 0; a < n_arms; ++a) {
            if (used[a]) continue;
            const double f = work(a, best_col) / p;
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < d; ++c) work(a, c) -= f * work(best_arm, c);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

Matrix rows_of(const Matrix& U, const std::vector<std::size_t>& idx) {
    Matrix V(idx.size(), U.cols());
    for (std::size_t j = 0; j < idx.size(); ++j)
        for (std::size_t c = 0; c < U.cols(); ++c) V(j, c) = U(idx[j], c);
    return V;
}

SpannerBasis finalize(const Matrix& U, std::vector<std::size_t> idx, double C) {
    SpannerBasis basis;
    basis.V = rows_of(U, idx);
    basis.V_inv = inv(basis.V);
    basis.indices = std::move(idx);
    basis.C = C;
    return basis;
}

std::uint64_t subset_count(std::size_t n, std::size_t k, std::uint64_t cap) {
    // binomial(n, k), saturating just above cap
    unsigned __int128 acc = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > 4 * static_cast<unsigned __int128>(cap)) return cap + 1;
    }
    return acc > cap ? cap + 1 : static_cast<std::uint64_t>(acc);
}

} // namespace

SpannerBasis exact_spanner(const Matrix& U, std::uint64_t budget) {
    const std::size_t n_arms = U.rows();
    const std::size_t d = U.cols();
    if (d == 0 || n_arms == 0) throw DimensionError("exact_spanner: empty kernel");
    greedy_full_rank_subset(U); // rank check up front

    if (subset_count(n_arms, d, budget) > budget)
        throw BudgetError("exact_spanner: subset count exceeds search budget");

    std::vector<std::size_t> idx(d);
    for (std::size_t j = 0; j < d; ++j) idx[j] = j;
    std::vector<std::size_t> best_idx;
    double best = -1.0;
    for (;;) {
        const double cand = std::fabs(det(rows_of(U, idx)));
        if (cand > best) {
            best = cand;
            best_idx = idx;
        }
        // next subset in lexicographic order
        std::size_t j = d;
        while (j > 0 && idx[j - 1] == n_arms - d + (j - 1)) --j;
        if (j == 0) break;
        ++idx[j - 1];
        for (std::size_t r = j; r < d; ++r) idx[r] = idx[r - 1] + 1;
    }
    return finalize(U, std::move(best_idx), 1.0);
}

SpannerBasis approx_spanner(const Matrix& U, double C) {
    if (!(C >= 1.0)) throw ParameterError("approx_spanner: C must be at least 1");
    const std::size_t n_arms = U.rows();
    const std::size_t d = U.cols();
    if (d == 0 || n_arms == 0) throw DimensionError("approx_spanner: empty kernel");

    std::vector<std::size_t> idx = greedy_full_rank_subset(U);
    Matrix V = rows_of(U, idx);
    Matrix V_inv = inv(V);
    // Replacing basis row j by arm i scales det(V) by the coefficient W(i, j),
    // so a swap improves by more than C exactly when |W(i, j)| > C.
    for (int iter = 0; iter < 100000; ++iter) {
        const Matrix W = matmul(U, V_inv);
        std::size_t swap_arm = n_arms, swap_pos = 0;
        for (std::size_t i = 0; i < n_arms && swap_arm == n_arms; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (std::fabs(W(i, j)) > C) {
                    swap_arm = i;
                    swap_pos = j;
                    break;
                }
        if (swap_arm == n_arms) {
            SpannerBasis basis;
            basis.indices = std::move(idx);
            basis.V = std::move(V);
            basis.V_inv = std::move(V_inv);
            basis.C = C;
            return basis;
        }
        idx[swap_pos] = swap_arm;
        V = rows_of(U, idx);
        V_inv = inv(V);
    }
    throw Error("approx_spanner: swap loop failed to terminate");
}

Matrix coefficients(const Matrix& U, const SpannerBasis& basis) {
    if (U.cols() != basis.V.cols())
        throw DimensionError("coefficients: kernel and basis widths differ");
    const Matrix W = matmul(U, basis.V_inv);
    const Matrix R = matmul(W, basis.V);
    for (std::size_t i = 0; i < U.rows(); ++i)
        for (std::size_t c = 0; c < U.cols(); ++c)
            if (std::fabs(R(i, c) - U(i, c)) > 1e-8)
                throw Error("coefficients: reconstruction residual too large");
    return W;
}

} // namespace lrb
