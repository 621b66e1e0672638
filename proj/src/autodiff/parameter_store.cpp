// SPDX-License-Identifier: Apache-2.0

#include "opbench/autodiff/parameter_store.hpp"

#include <algorithm>

#include "opbench/errors.hpp"

namespace opbench::ad
{

Tensor &ParameterStore::add(const std::string &name, Tensor value)
{
  if (contains(name))
  {
    throw SpecError("duplicate parameter name '" + name + "'");
  }
  index_.emplace(name, entries_.size());
  entries_.push_back({name, std::move(value)});
  return entries_.back().value;
}

std::size_t ParameterStore::index_of(const std::string &name) const
{
  const auto it = index_.find(name);
  if (it == index_.end())
  {
    throw SpecError("unknown parameter '" + name + "'");
  }
  return it->second;
}

std::size_t ParameterStore::total_count() const noexcept
{
  std::size_t n = 0;
  for (const auto &e : entries_)
  {
    n += e.value.size();
  }
  return n;
}

ParameterStore ParameterStore::zeros_like() const
{
  ParameterStore out;
  for (const auto &e : entries_)
  {
    out.add(e.name, Tensor::zeros_like(e.value));
  }
  return out;
}

std::vector<double> ParameterStore::flatten() const
{
  std::vector<double> flat;
  flat.reserve(total_count());
  for (const auto &e : entries_)
  {
    flat.insert(flat.end(), e.value.data().begin(), e.value.data().end());
  }
  return flat;
}

void ParameterStore::assign_flat(std::span<const double> flat)
{
  if (flat.size() != total_count())
  {
    throw SpecError("flat parameter vector has length " + std::to_string(flat.size()) +
                    ", expected " + std::to_string(total_count()));
  }
  std::size_t offset = 0;
  for (auto &e : entries_)
  {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), e.value.size(),
                e.value.data().begin());
    offset += e.value.size();
  }
}

bool ParameterStore::operator==(const ParameterStore &other) const
{
  if (entries_.size() != other.entries_.size())
  {
    return false;
  }
  for (std::size_t i = 0; i < entries_.size(); ++i)
  {
    if (entries_[i].name != other.entries_[i].name || !(entries_[i].value == other.entries_[i].value))
    {
      return false;
    }
  }
  return true;
}

}  // namespace opbench::ad
