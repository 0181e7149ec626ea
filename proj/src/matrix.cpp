#include "lrb/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "lrb/error.hpp"

namespace lrb {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw DimensionError("from_rows: no rows");
    const std::size_t cols = rows.front().size();
    if (cols == 0) throw DimensionError("from_rows: empty row");
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw DimensionError("from_rows: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Vector Matrix::row(std::size_t r) const {
    Vector out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
    return out;
}

void Matrix::set_row(std::size_t r, const Vector& v) {
    if (v.size() != cols_) throw DimensionError("set_row: length mismatch");
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = v[c];
}

bool all_finite(const Matrix& m) {
    for (double x : m.data())
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double det(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("det: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) throw DimensionError("det: empty matrix");
    Matrix a = m;
    double sign = 1.0;
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(a(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double cand = std::fabs(a(r, k));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a(k, c), a(piv, c));
            sign = -sign;
        }
        prod *= a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a(r, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
        }
    }
    return sign * prod;
}

Matrix inv(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) throw DimensionError("inv: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) throw DimensionError("inv: empty matrix");
    Matrix a = m;
    Matrix out = Matrix::identity(n);
    double max_piv = 0.0;
    double min_piv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(a(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double cand = std::fabs(a(r, k));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        max_piv = std::max(max_piv, best);
        min_piv = (k == 0) ? best : std::min(min_piv, best);
        if (best == 0.0 || best < rel_tol * max_piv) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "inv: singular at pivot %zu (|p|=%.3e)", k, best);
            throw SingularError(buf);
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(k, c), a(piv, c));
                std::swap(out(k, c), out(piv, c));
            }
        }
        const double p = a(k, k);
        for (std::size_t c = 0; c < n; ++c) {
            a(k, c) /= p;
            out(k, c) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k) continue;
            const double f = a(r, k);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(k, c);
                out(r, c) -= f * out(k, c);
            }
        }
    }
    if (min_piv < rel_tol * max_piv)
        throw SingularError("inv: pivot ratio below tolerance");
    return out;
}

Vector matvec(const Matrix& m, const Vector& x) {
    if (m.cols() != x.size()) throw DimensionError("matvec: length mismatch");
    Vector out(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * x[c];
        out[r] = s;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: shape mismatch");
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += f * b(k, j);
        }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
    return out;
}

double smallest_eigenvalue_sym(const Matrix& m, double tol) {
    if (m.rows() != m.cols())
        throw DimensionError("smallest_eigenvalue_sym: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) throw DimensionError("smallest_eigenvalue_sym: empty matrix");
    double scale = 0.0;
    for (double x : m.data()) scale = std::max(scale, std::fabs(x));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c)
            if (std::fabs(m(r, c) - m(c, r)) > 1e-8 * std::max(1.0, scale))
                throw ParameterError("smallest_eigenvalue_sym: not symmetric");

    Matrix a = m;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            a(r, c) = 0.5 * (m(r, c) + m(c, r));

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off = std::max(off, std::fabs(a(p, q)));
        if (off <= tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= tol * 1e-3) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) /
                    (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    double lo = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a(i, i));
    return lo;
}

} // namespace lrb
