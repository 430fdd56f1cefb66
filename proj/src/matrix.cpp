#include "whcn/matrix.hpp"

#include <cmath>

#include "whcn/errors.hpp"

namespace whcn {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix& Matrix::add_scaled(const Matrix& o, double scale) {
    if (!same_shape(o)) throw ShapeMismatch("add_scaled: shapes differ");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += scale * o.data_[k];
    return *this;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

namespace {

void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    const std::size_t n = a.cols(), p = b.cols();
    double* out = c.row(i);
    for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        const double* brow = b.row(k);
        for (std::size_t j = 0; j < p; ++j) out[j] += aik * brow[j];
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.cols() != b.rows())
        throw ShapeMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    const long long m = static_cast<long long>(a.rows());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < m; ++i)
            matmul_row(a, b, c, static_cast<std::size_t>(i));
    } else {
        for (long long i = 0; i < m; ++i)
            matmul_row(a, b, c, static_cast<std::size_t>(i));
    }
    return c;
}

}  // namespace whcn
