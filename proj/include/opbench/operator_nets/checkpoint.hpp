// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "opbench/operator_nets/model.hpp"

namespace opbench::nets
{

/**
 * A checkpoint directory holds `checkpoint.json` and `params.f64`. The
 * manifest lists every parameter with shape and offset into the flat
 * little-endian float64 blob, the architecture, normalization statistics and
 * caller metadata (benchmark id, seeds, config hash).
 */
struct Checkpoint
{
  OperatorModel model;
  nlohmann::json metadata = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path &dir, const OperatorModel &model,
                     const nlohmann::json &metadata = nlohmann::json::object());

// Throws InputError on a malformed or inconsistent checkpoint.
Checkpoint load_checkpoint(const std::filesystem::path &dir);

}  // namespace opbench::nets
