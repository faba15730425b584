#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ocksr/errors.hpp"

namespace ocksr {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Dense symmetric matrix. Storage is the full square; the two triangles are
// kept bitwise identical (writes go through set()).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : m_(n, n, 0.0) {}

    // Validates exact symmetry and finiteness of a full dense matrix.
    static SymMatrix from_dense(Matrix m) {
        if (m.rows() != m.cols() || m.rows() == 0)
            throw DimensionMismatch("symmetric matrix must be square and non-empty");
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                if (m(i, j) != m(j, i))
                    throw DimensionMismatch("matrix is not symmetric as stored");
                if (!std::isfinite(m(i, j)))
                    throw DimensionMismatch("matrix has non-finite entries");
            }
        }
        SymMatrix s;
        s.m_ = std::move(m);
        return s;
    }

    std::size_t size() const { return m_.rows(); }

    void set(std::size_t i, std::size_t j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    const double* row(std::size_t i) const { return m_.row(i); }
    const Matrix& dense() const { return m_; }

    SymMatrix plus_diagonal(double d) const {
        SymMatrix out = *this;
        for (std::size_t i = 0; i < size(); ++i) out.m_(i, i) += d;
        return out;
    }

    SymMatrix scaled(double s) const {
        SymMatrix out = *this;
        for (double& v : out.m_.data()) v *= s;
        return out;
    }

private:
    Matrix m_;
};

}  // namespace ocksr
