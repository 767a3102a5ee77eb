#include "semra/autodiff/array.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::ad {

Array::Array(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Array::Array(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols)
        throw DimensionError("Array: " + std::to_string(values_.size()) + " values for shape " +
                             std::to_string(rows) + "x" + std::to_string(cols));
}

Array Array::row(std::initializer_list<double> values) {
    return Array(1, values.size(), std::vector<double>(values));
}

Array Array::row(std::span<const double> values) {
    return Array(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

double Array::item() const {
    if (values_.size() != 1) throw DimensionError("Array::item on non-scalar");
    return values_[0];
}

bool Array::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Array::all_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

void Array::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

}  // namespace semra::ad
