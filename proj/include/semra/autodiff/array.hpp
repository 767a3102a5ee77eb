#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace semra::ad {

// Dense row-major real matrix. Vectors are 1 x n rows; scalars are 1 x 1.
class Array {
public:
    Array() = default;
    Array(std::size_t rows, std::size_t cols, double fill = 0.0);
    Array(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Array scalar(double v) { return Array(1, 1, v); }
    static Array row(std::initializer_list<double> values);
    static Array row(std::span<const double> values);
    static Array zeros_like(const Array& a) { return Array(a.rows(), a.cols()); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::vector<std::size_t> shape() const { return {rows_, cols_}; }
    bool same_shape(const Array& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> row_span(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
    std::span<double> row_span(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    const std::vector<double>& data() const noexcept { return values_; }

    double item() const;
    bool all_finite() const noexcept;
    bool all_zero() const noexcept;
    void fill(double v);

    friend bool operator==(const Array&, const Array&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

}  // namespace semra::ad
