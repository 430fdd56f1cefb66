#pragma once

#include <cstddef>
#include <vector>

#include "whcn/exec.hpp"

namespace whcn {

// Dense row-major matrix of doubles. Everything in the pipeline that the
// formulas treat as a matrix (features, incidence, layer weights, Laplacians)
// lives in this type.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

    Matrix transposed() const;

    // Elementwise helpers; shapes must match (ShapeMismatch otherwise).
    Matrix& add_scaled(const Matrix& o, double scale);
    double max_abs() const;
    double frobenius_norm() const;

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// c = a * b. Parallelized over output rows; each entry is a sequential dot
// product, so both policies give bitwise-identical results.
Matrix matmul(const Matrix& a, const Matrix& b, Exec exec = Exec::Parallel);

}  // namespace whcn
