// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opbench
{

// Base class for every error raised by the library. `kind()` is the stable
// machine-readable tag emitted by the CLI error JSON.
class Error : public std::runtime_error
{
public:
  Error(std::string kind, const std::string &what)
    : std::runtime_error(what), kind_(std::move(kind))
  {
  }

  const std::string &kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

class GenerationError : public Error
{
public:
  explicit GenerationError(const std::string &what, std::size_t index = 0)
    : Error("GenerationError", what), index_(index)
  {
  }

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

class SolverError : public Error
{
public:
  SolverError(const std::string &what, std::size_t step)
    : Error("SolverError", what + " (step " + std::to_string(step) + ")"), step_(step)
  {
  }

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

class GraphError : public Error
{
public:
  GraphError(const std::string &op, const std::string &what)
    : Error("GraphError", op + ": " + what)
  {
  }
};

class SpecError : public Error
{
public:
  explicit SpecError(const std::string &what) : Error("SpecError", what) {}
};

class InputError : public Error
{
public:
  explicit InputError(const std::string &what) : Error("InputError", what) {}
};

class TrainingError : public Error
{
public:
  TrainingError(const std::string &what, std::size_t epoch)
    : Error("TrainingError", what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch)
  {
  }

  std::size_t epoch() const noexcept { return epoch_; }

private:
  std::size_t epoch_;
};

class ConstitutiveError : public Error
{
public:
  explicit ConstitutiveError(const std::string &what) : Error("ConstitutiveError", what) {}
};

class HarnessError : public Error
{
public:
  explicit HarnessError(const std::string &what) : Error("HarnessError", what) {}
};

}  // namespace opbench
