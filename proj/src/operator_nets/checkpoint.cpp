// SPDX-License-Identifier: Apache-2.0

#include "opbench/operator_nets/checkpoint.hpp"

#include "opbench/errors.hpp"
#include "opbench/io/binary.hpp"

namespace opbench::nets
{

namespace
{

constexpr int kFormatVersion = 1;
constexpr const char *kManifest = "checkpoint.json";
constexpr const char *kBlob = "params.f64";

}  // namespace

void save_checkpoint(const std::filesystem::path &dir, const OperatorModel &model, const nlohmann::json &metadata)
{
  std::filesystem::create_directories(dir);
  const std::vector<double> flat = model.params.flatten();
  io::write_f64_le(dir / kBlob, flat);

  nlohmann::json params = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto &e : model.params.entries())
  {
    params.push_back({{"name", e.name}, {"shape", e.value.shape()}, {"offset", offset}, {"count", e.value.size()}});
    offset += e.value.size();
  }
  nlohmann::json m{{"format_version", kFormatVersion},
                   {"architecture", model.spec},
                   {"normalization", model.norm},
                   {"parameters", params},
                   {"total_parameters", flat.size()},
                   {"blob", kBlob},
                   {"blob_sha256", io::sha256_file(dir / kBlob)},
                   {"metadata", metadata}};
  io::write_text(dir / kManifest, m.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path &dir)
{
  nlohmann::json m;
  try
  {
    m = nlohmann::json::parse(io::read_text(dir / kManifest));
  }
  catch (const nlohmann::json::exception &e)
  {
    throw InputError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  if (m.value("format_version", 0) != kFormatVersion)
  {
    throw InputError("unsupported checkpoint format version");
  }
  const auto blob_path = dir / m.at("blob").get<std::string>();
  if (io::sha256_file(blob_path) != m.at("blob_sha256").get<std::string>())
  {
    throw InputError("checkpoint blob hash mismatch");
  }
  Checkpoint c;
  try
  {
    c.model = build_model(m.at("architecture").get<ArchitectureSpec>());
    c.model.norm = m.at("normalization").get<Normalization>();
    c.metadata = m.value("metadata", nlohmann::json::object());
  }
  catch (const nlohmann::json::exception &e)
  {
    throw InputError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  c.model.norm.validate(c.model.spec);
  const auto &listed = m.at("parameters");
  const auto &entries = c.model.params.entries();
  if (listed.size() != entries.size())
  {
    throw InputError("checkpoint parameter list does not match the architecture");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < entries.size(); ++i)
  {
    if (listed[i].at("name").get<std::string>() != entries[i].name ||
        listed[i].at("shape").get<ad::Shape>() != entries[i].value.shape() ||
        listed[i].at("offset").get<std::size_t>() != offset)
    {
      throw InputError("checkpoint parameter '" + entries[i].name + "' does not match the architecture");
    }
    offset += entries[i].value.size();
  }
  const std::vector<double> flat = io::read_f64_le(blob_path);
  if (flat.size() != offset)
  {
    throw InputError("checkpoint blob holds " + std::to_string(flat.size()) + " values, expected " +
                     std::to_string(offset));
  }
  c.model.params.assign_flat(flat);
  return c;
}

}  // namespace opbench::nets
