// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "opbench/autodiff/graph.hpp"
#include "opbench/autodiff/parameter_store.hpp"
#include "opbench/autodiff/tensor.hpp"
#include "opbench/operator_nets/architecture.hpp"

namespace opbench::nets
{

// y = (x - shift) / scale and back.
struct AffineNorm
{
  double shift = 0.0;
  double scale = 1.0;

  double normalize(double x) const noexcept { return (x - shift) / scale; }
  double denormalize(double y) const noexcept { return y * scale + shift; }
  bool valid() const noexcept;
  bool operator==(const AffineNorm &) const = default;
};

struct Normalization
{
  std::vector<AffineNorm> inputs;   // one per input function
  std::vector<AffineNorm> outputs;  // one per output field
  // Per coordinate axis; mapped affinely onto [-1, 1].
  std::vector<double> coord_low;
  std::vector<double> coord_high;

  static Normalization identity(const ArchitectureSpec &spec);
  // Throws SpecError unless finite with nonzero scales and matching spec.
  void validate(const ArchitectureSpec &spec) const;
  double coord_to_unit(std::size_t axis, double x) const;
  bool operator==(const Normalization &) const = default;
};

void to_json(nlohmann::json &j, const AffineNorm &n);
void from_json(const nlohmann::json &j, AffineNorm &n);
void to_json(nlohmann::json &j, const Normalization &n);
void from_json(const nlohmann::json &j, Normalization &n);

/**
 * Parameter layout:
 *   deeponet    branch<b>.<l>.{weight,bias}
 *   s_deeponet  branch<b>.encoder.*, branch<b>.decoder.*, branch<b>.head.*
 *   trunk.<l>.{weight,bias}, beta [c]
 * The trunk output column c*h + k is hidden unit k of field c.
 */
struct OperatorModel
{
  ArchitectureSpec spec;
  ad::ParameterStore params;
  Normalization norm;
};

// Throws SpecError on an invalid spec.
OperatorModel build_model(const ArchitectureSpec &spec);

// Query coordinates, one row per point; columns are (x, t) or x alone.
struct QueryBatch
{
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> coords;

  std::size_t size() const noexcept { return static_cast<std::size_t>(coords.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(coords.cols()); }
};

// Number of queries outside the coordinate box recorded in the normalization.
std::size_t count_outside_domain(const OperatorModel &model, const QueryBatch &queries);

// Inputs in physical units: inputs[i] is [batch, sensors_i] (deeponet) or
// [batch, steps] (s_deeponet). Throws InputError on count or size mismatch.
void check_inputs(const ArchitectureSpec &spec, const std::vector<ad::Tensor> &inputs);

// Graph-level pieces operating in normalized space.
ad::Var branch_forward(ad::Graph &g, const OperatorModel &model, const std::vector<ad::Tensor> &normalized_inputs);
ad::Var trunk_forward(ad::Graph &g, const OperatorModel &model, const ad::Tensor &unit_coords);
// [batch, c, n] normalized outputs.
ad::Var network_forward(ad::Graph &g, const OperatorModel &model, const std::vector<ad::Tensor> &normalized_inputs,
                        const ad::Tensor &unit_coords);

std::vector<ad::Tensor> normalize_inputs(const OperatorModel &model, const std::vector<ad::Tensor> &inputs);
ad::Tensor normalize_coords(const OperatorModel &model, const QueryBatch &queries);

// Predictions in physical units, laid out [batch, c, n].
ad::Tensor forward_deeponet(const OperatorModel &model, const std::vector<ad::Tensor> &input_functions,
                            const QueryBatch &queries);
ad::Tensor forward_s_deeponet(const OperatorModel &model, const std::vector<ad::Tensor> &input_sequences,
                              const QueryBatch &queries);
ad::Tensor forward(const OperatorModel &model, const std::vector<ad::Tensor> &inputs, const QueryBatch &queries);

/**
 * Inference with the trunk evaluated once for a fixed query set. Only the
 * branch runs per call; the contraction is one matrix product per field.
 * Immutable after construction and safe to share between threads.
 */
class FieldPredictor
{
public:
  FieldPredictor(const OperatorModel &model, const QueryBatch &queries);

  std::size_t n_queries() const noexcept { return n_queries_; }
  std::size_t n_fields() const noexcept { return trunk_t_.size(); }

  // [batch, c, n] in physical units.
  ad::Tensor predict(const std::vector<ad::Tensor> &inputs) const;

private:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  OperatorModel model_;
  std::size_t n_queries_;
  // Per field: transposed trunk slice [h, n].
  std::vector<RowMatrix> trunk_t_;
};

}  // namespace opbench::nets
