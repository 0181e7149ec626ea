#pragma once

#include <cstdint>
#include <vector>

#include "lrb/matrix.hpp"

namespace lrb {

// A size-d subset of arms whose rows form a well-spread basis: every arm's
// row is a combination of the basis rows with coefficients bounded by C.
struct SpannerBasis {
    std::vector<std::size_t> indices; // arm per basis position
    Matrix V;                         // d x d, row j is the row of arm indices[j]
    Matrix V_inv;
    double C = 1.0; // guaranteed bound on |coefficients|
};

// Exhaustive search over all d-row subsets for the largest |det|, ties going
// to the lexicographically smallest index list. Refuses instances with more
// than `budget` subsets (BudgetError) and rank-deficient inputs (RankError).
SpannerBasis exact_spanner(const Matrix& U, std::uint64_t budget = 2'000'000);

// Swap-to-improvement search: start from a greedily pivoted full-rank subset,
// then replace basis row j by arm i whenever that multiplies |det| by more
// than C. At termination every coefficient is bounded by C in magnitude.
SpannerBasis approx_spanner(const Matrix& U, double C = 2.0);

// Row i solves u_i = w V for the given basis; returns the N x d matrix of w's.
Matrix coefficients(const Matrix& U, const SpannerBasis& basis);

} // namespace lrb
