#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cfair/errors.hpp"

namespace cfair {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw ShapeError("Matrix: data length != rows * cols");
    }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix column(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    Matrix select_rows(std::span<const std::size_t> indices) const;
    Matrix select_cols(std::size_t first, std::size_t count) const;
    std::vector<double> col(std::size_t c) const;
    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// [a | b]; row counts must agree.
Matrix hconcat(const Matrix& a, const Matrix& b);

/// a * b (a: n x k, b: k x m).
Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T * b (a: n x k, b: n x m) -> k x m.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * b^T (a: n x k, b: m x k) -> n x m.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

}  // namespace cfair
