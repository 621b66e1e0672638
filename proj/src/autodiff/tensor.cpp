// SPDX-License-Identifier: Apache-2.0

#include "opbench/autodiff/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "opbench/errors.hpp"

namespace opbench::ad
{

std::size_t element_count(const Shape &shape) noexcept
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape &shape)
{
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i)
  {
    s += (i ? ", " : "") + std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill)
  : shape_(std::move(shape)), data_(element_count(shape_), fill)
{
}

Tensor::Tensor(Shape shape, std::vector<double> data)
  : shape_(std::move(shape)), data_(data.begin(), data.end())
{
  if (data_.size() != element_count(shape_))
  {
    throw GraphError("Tensor", "data length " + std::to_string(data_.size()) +
                                   " does not match shape " + to_string(shape_));
  }
}

Tensor Tensor::reshaped(Shape shape) const
{
  if (element_count(shape) != size())
  {
    throw GraphError("reshape", "cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  }
  Tensor out = *this;
  out.shape_ = std::move(shape);
  out.requires_grad = requires_grad;
  return out;
}

void Tensor::fill(double v)
{
  std::fill(data_.begin(), data_.end(), v);
}

}  // namespace opbench::ad
