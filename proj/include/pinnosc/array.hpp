#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "pinnosc/errors.hpp"

namespace pinnosc {

/// Dense row-major array of 64-bit floats. Shapes are runtime vectors; most of
/// the toolkit uses rank 1 and 2. Values are treated as immutable once an
/// operation has produced them.
class Array {
  public:
    Array() = default;
    Array(std::vector<int> shape, std::vector<double> data);
    explicit Array(std::vector<int> shape);  // zero-filled

    static Array zeros(std::vector<int> shape) { return Array(std::move(shape)); }
    static Array full(std::vector<int> shape, double v);
    static Array scalar(double v) { return Array({1}, {v}); }
    static Array identity(int n);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator()(int i) { return data_[static_cast<std::size_t>(i)]; }
    double operator()(int i) const { return data_[static_cast<std::size_t>(i)]; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * dim(1) + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim(1) + j]; }

    bool same_shape(const Array& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

  private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

std::size_t shape_size(const std::vector<int>& shape);

/// Standard product; shapes [m×k]·[k×n] -> [m×n]. Throws DimensionError on mismatch.
Array matmul(const Array& a, const Array& b);
Array transpose(const Array& a);
Array add(const Array& a, const Array& b);
Array sub(const Array& a, const Array& b);
Array mul(const Array& a, const Array& b);
Array scale(const Array& a, double c);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

}  // namespace pinnosc
