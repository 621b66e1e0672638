// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "opbench/autodiff/tensor.hpp"

namespace opbench::ad
{

// Named parameter tensors in insertion order. The flat layout used by
// checkpoints concatenates entries in that order.
class ParameterStore
{
public:
  struct Entry
  {
    std::string name;
    Tensor value;
  };

  // Throws SpecError on a duplicate name.
  Tensor &add(const std::string &name, Tensor value);

  bool contains(const std::string &name) const { return index_.count(name) != 0; }
  std::size_t index_of(const std::string &name) const;
  Tensor &at(const std::string &name) { return entries_[index_of(name)].value; }
  const Tensor &at(const std::string &name) const { return entries_[index_of(name)].value; }

  std::vector<Entry> &entries() noexcept { return entries_; }
  const std::vector<Entry> &entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  // Total number of scalar parameters.
  std::size_t total_count() const noexcept;

  ParameterStore zeros_like() const;
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);

  bool operator==(const ParameterStore &other) const;

private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace opbench::ad
