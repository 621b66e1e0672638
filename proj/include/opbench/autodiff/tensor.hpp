// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace opbench::ad
{

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape &shape) noexcept;
std::string to_string(const Shape &shape);

// Dense row-major float64 tensor.
class Tensor
{
public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros_like(const Tensor &other) { return Tensor(other.shape_); }

  const Shape &shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  // Leading dimension and the product of the remaining ones.
  std::size_t rows() const noexcept { return shape_.empty() ? 1 : shape_[0]; }
  std::size_t cols() const noexcept { return shape_.empty() || shape_[0] == 0 ? 0 : size() / shape_[0]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  double *ptr() noexcept { return data_.data(); }
  const double *ptr() const noexcept { return data_.data(); }

  double &operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double &at(std::size_t i, std::size_t j) { return data_[i * shape_.back() + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * shape_.back() + j]; }

  Tensor reshaped(Shape shape) const;
  void fill(double v);

  // Leaf flag consulted by Graph::input.
  bool requires_grad = false;

  bool operator==(const Tensor &other) const
  {
    return shape_ == other.shape_ && data_ == other.data_;
  }

private:
  Shape shape_;
  // Fixed alignment keeps Eigen's vectorized reduction order independent of
  // where the allocator places a buffer.
  std::vector<double, Eigen::aligned_allocator<double>> data_;
};

}  // namespace opbench::ad
