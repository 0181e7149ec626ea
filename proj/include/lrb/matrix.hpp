#pragma once

#include <cstddef>
#include <vector>

namespace lrb {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Sizes stay small here (d up to ~32,
// N up to a few thousand), so everything below favors clarity and stable
// pivoting over speed.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Vector row(std::size_t r) const;
    void set_row(std::size_t r, const Vector& v);

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

double dot(const Vector& a, const Vector& b);

// Determinant by Gaussian elimination with partial pivoting. Square input
// required; a singular matrix yields 0 rather than an error.
double det(const Matrix& m);

// Inverse by Gauss-Jordan with partial pivoting. Raises SingularError when
// the smallest pivot falls below rel_tol times the largest one, which
// separates structural rank loss from ordinary roundoff.
Matrix inv(const Matrix& m, double rel_tol = 1e-12);

Vector matvec(const Matrix& m, const Vector& x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi sweeps.
// tol is the absolute off-diagonal threshold; inputs here are O(1) scaled.
double smallest_eigenvalue_sym(const Matrix& m, double tol = 1e-10);

} // namespace lrb
