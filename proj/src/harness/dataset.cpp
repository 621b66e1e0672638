// SPDX-License-Identifier: Apache-2.0

#include "opbench/harness/dataset.hpp"

#include <algorithm>
#include <iostream>

#include "opbench/errors.hpp"
#include "opbench/fem/reaction_diffusion.hpp"
#include "opbench/field_gen/rng.hpp"
#include "opbench/io/binary.hpp"
#include "opbench/parallel.hpp"

namespace opbench::harness
{

namespace
{

constexpr int kFormatVersion = 1;
constexpr const char *kManifest = "dataset.json";

std::string trend_name(field_gen::Trend t)
{
  switch (t)
  {
  case field_gen::Trend::increasing: return "increasing";
  case field_gen::Trend::decreasing: return "decreasing";
  default: return "none";
  }
}

field_gen::Trend parse_trend(const std::string &s)
{
  if (s == "none") return field_gen::Trend::none;
  if (s == "increasing") return field_gen::Trend::increasing;
  if (s == "decreasing") return field_gen::Trend::decreasing;
  throw SpecError("unknown trend '" + s + "'");
}

nlohmann::json spec_json(const field_gen::InputSpec &spec)
{
  if (const auto *g = std::get_if<field_gen::GrfSpec>(&spec))
  {
    return {{"kind", "grf"},
            {"n_points", g->n_points},
            {"domain_length", g->domain_length},
            {"mean", g->mean},
            {"variance", g->variance},
            {"correlation_length", g->correlation_length}};
  }
  const auto &r = std::get<field_gen::RbfProfileSpec>(spec);
  return {{"kind", "rbf"},
          {"n_knots", r.n_knots},
          {"knot_low", r.knot_low},
          {"knot_high", r.knot_high},
          {"trend", trend_name(r.trend)},
          {"n_points", r.n_points},
          {"domain_length", r.domain_length},
          {"rbf_width", r.rbf_width}};
}

field_gen::InputSpec spec_from_json(const nlohmann::json &j, const field_gen::InputSpec &fallback)
{
  const std::string kind = j.value("kind", std::holds_alternative<field_gen::GrfSpec>(fallback) ? "grf" : "rbf");
  if (kind == "grf")
  {
    field_gen::GrfSpec g = std::holds_alternative<field_gen::GrfSpec>(fallback) ? std::get<field_gen::GrfSpec>(fallback)
                                                                               : field_gen::GrfSpec{};
    g.n_points = j.value("n_points", g.n_points);
    g.domain_length = j.value("domain_length", g.domain_length);
    g.mean = j.value("mean", g.mean);
    g.variance = j.value("variance", g.variance);
    g.correlation_length = j.value("correlation_length", g.correlation_length);
    return g;
  }
  if (kind == "rbf")
  {
    field_gen::RbfProfileSpec r = std::holds_alternative<field_gen::RbfProfileSpec>(fallback)
                                      ? std::get<field_gen::RbfProfileSpec>(fallback)
                                      : field_gen::RbfProfileSpec{};
    r.n_knots = j.value("n_knots", r.n_knots);
    r.knot_low = j.value("knot_low", r.knot_low);
    r.knot_high = j.value("knot_high", r.knot_high);
    r.trend = parse_trend(j.value("trend", trend_name(r.trend)));
    r.n_points = j.value("n_points", r.n_points);
    r.domain_length = j.value("domain_length", r.domain_length);
    r.rbf_width = j.value("rbf_width", r.rbf_width);
    return r;
  }
  throw SpecError("unknown input generator kind '" + kind + "'");
}

field_gen::InputSpec with_seed(field_gen::InputSpec spec, std::uint64_t seed)
{
  std::visit([seed](auto &s) { s.seed = seed; }, spec);
  return spec;
}

std::size_t spec_points(const field_gen::InputSpec &spec)
{
  return std::visit([](const auto &s) { return s.n_points; }, spec);
}

double spec_length(const field_gen::InputSpec &spec)
{
  return std::visit([](const auto &s) { return s.domain_length; }, spec);
}

double spec_mean(const field_gen::InputSpec &spec)
{
  if (const auto *g = std::get_if<field_gen::GrfSpec>(&spec))
  {
    return g->mean;
  }
  const auto &r = std::get<field_gen::RbfProfileSpec>(spec);
  return 0.5 * (r.knot_low + r.knot_high);
}

nlohmann::json dirichlet_json(const fem::DirichletBc &bc)
{
  return {{"type", "dirichlet"}, {"left", bc.left}, {"right", bc.right}};
}

fem::DirichletBc dirichlet_from_json(const nlohmann::json &j, fem::DirichletBc d)
{
  d.left = j.value("left", d.left);
  d.right = j.value("right", d.right);
  return d;
}

std::vector<float> to_float(const std::vector<double> &v)
{
  std::vector<float> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return static_cast<float>(x); });
  return out;
}

std::string array_file(const std::string &name)
{
  return name + ".f32";
}

}  // namespace

std::string to_string(Benchmark b)
{
  switch (b)
  {
  case Benchmark::reaction_diffusion: return "reaction_diffusion";
  case Benchmark::thermo_electrical_coupled: return "thermo_electrical_coupled";
  default: return "thermo_electrical_uncoupled";
  }
}

Benchmark parse_benchmark(const std::string &s)
{
  if (s == "reaction_diffusion") return Benchmark::reaction_diffusion;
  if (s == "thermo_electrical_coupled") return Benchmark::thermo_electrical_coupled;
  if (s == "thermo_electrical_uncoupled") return Benchmark::thermo_electrical_uncoupled;
  throw SpecError("unknown benchmark '" + s + "'");
}

bool is_thermo_electrical(Benchmark b) noexcept
{
  return b != Benchmark::reaction_diffusion;
}

DatasetConfig DatasetConfig::defaults(Benchmark b)
{
  DatasetConfig c;
  c.benchmark = b;
  if (b == Benchmark::reaction_diffusion)
  {
    c.n_samples = 1000;
    const std::size_t n = 2 * c.n_elements + 1;
    c.inputs = {{"u0", field_gen::GrfSpec{n, 1.0, 0.0, 1.0, 0.1, 0}, std::nullopt},
                {"k", field_gen::GrfSpec{n, 1.0, 1.0, 0.25, 0.1, 0}, std::nullopt}};
  }
  else
  {
    c.n_samples = 500;
    const std::size_t n = c.scheme.n_steps;
    c.inputs = {{"q_ext", field_gen::GrfSpec{n, c.scheme.t_end, 1.0, 0.25, 0.1, 0}, std::nullopt},
                {"rho_e", field_gen::GrfSpec{n, c.scheme.t_end, 0.0, 1.0, 0.1, 0}, std::nullopt}};
  }
  return c;
}

void DatasetConfig::validate() const
{
  if (n_samples == 0)
  {
    throw SpecError("n_samples must be at least 1");
  }
  if (n_elements == 0)
  {
    throw SpecError("n_elements must be positive");
  }
  scheme.validate();
  if (inputs.size() != 2)
  {
    throw SpecError("both benchmarks take exactly two input functions");
  }
  const std::size_t expected = benchmark == Benchmark::reaction_diffusion ? 2 * n_elements + 1 : scheme.n_steps;
  for (const auto &in : inputs)
  {
    std::visit([](const auto &s) { s.validate(); }, in.spec);
    if (spec_points(in.spec) != expected)
    {
      throw SpecError("input '" + in.name + "' must have " + std::to_string(expected) + " points");
    }
  }
  if (!(beta > 0.0))
  {
    throw SpecError("beta must be positive");
  }
}

void to_json(nlohmann::json &j, const DatasetConfig &c)
{
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto &in : c.inputs)
  {
    nlohmann::json e{{"name", in.name}, {"generator", spec_json(in.spec)}};
    e["fixed_seed"] = in.fixed_seed ? nlohmann::json(*in.fixed_seed) : nlohmann::json(nullptr);
    inputs.push_back(e);
  }
  j = nlohmann::json{{"benchmark", to_string(c.benchmark)},
                     {"n_samples", c.n_samples},
                     {"master_seed", c.master_seed},
                     {"grid", {{"n_elements", c.n_elements}, {"n_nodes", 2 * c.n_elements + 1},
                               {"element_order", 2}, {"domain", {0.0, 1.0}}}},
                     {"scheme", {{"n_steps", c.scheme.n_steps}, {"t_end", c.scheme.t_end}}},
                     {"inputs", inputs},
                     {"max_retries", c.max_retries},
                     {"initial_conditions", "zero"}};
  if (c.benchmark == Benchmark::reaction_diffusion)
  {
    j["boundary"] = {{"u", dirichlet_json(c.bc.u)}};
    j["diffusivity"] = c.diffusivity;
    j["time_integrator"] = "backward_euler";
  }
  else
  {
    j["boundary"] = {{"T", dirichlet_json(c.bc.temperature)}, {"phi", dirichlet_json(c.bc.potential)}};
    j["k_thermal"] = c.k_thermal;
    j["beta"] = c.beta;
    j["coupling"] = c.benchmark == Benchmark::thermo_electrical_coupled ? "coupled" : "uncoupled";
    j["picard"] = {{"tolerance", c.picard.tolerance},
                   {"max_iterations", c.picard.max_iterations},
                   {"potential_time_order", c.picard.potential_time_order}};
    j["time_integrator"] = {{"T", "backward_euler"},
                            {"phi", c.picard.potential_time_order == 2 ? "newmark_beta_0.25_gamma_0.5"
                                                                       : "backward_euler"}};
  }
}

DatasetConfig dataset_config_from_json(const nlohmann::json &j)
{
  DatasetConfig c = DatasetConfig::defaults(parse_benchmark(j.value("benchmark", "reaction_diffusion")));
  c.n_samples = j.value("n_samples", c.n_samples);
  c.master_seed = j.value("master_seed", c.master_seed);
  if (j.contains("grid"))
  {
    c.n_elements = j["grid"].value("n_elements", c.n_elements);
    if (c.benchmark == Benchmark::reaction_diffusion)
    {
      for (auto &in : c.inputs)
      {
        std::get<field_gen::GrfSpec>(in.spec).n_points = 2 * c.n_elements + 1;
      }
    }
  }
  if (j.contains("scheme"))
  {
    c.scheme.n_steps = j["scheme"].value("n_steps", c.scheme.n_steps);
    c.scheme.t_end = j["scheme"].value("t_end", c.scheme.t_end);
    if (c.benchmark != Benchmark::reaction_diffusion)
    {
      for (auto &in : c.inputs)
      {
        auto &g = std::get<field_gen::GrfSpec>(in.spec);
        g.n_points = c.scheme.n_steps;
        g.domain_length = c.scheme.t_end;
      }
    }
  }
  if (j.contains("inputs"))
  {
    const auto &arr = j.at("inputs");
    if (arr.size() != c.inputs.size())
    {
      throw SpecError("inputs must list exactly two generators");
    }
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
      c.inputs[i].name = arr[i].value("name", c.inputs[i].name);
      if (arr[i].contains("generator"))
      {
        c.inputs[i].spec = spec_from_json(arr[i]["generator"], c.inputs[i].spec);
      }
      if (arr[i].contains("fixed_seed") && !arr[i]["fixed_seed"].is_null())
      {
        c.inputs[i].fixed_seed = arr[i]["fixed_seed"].get<std::uint64_t>();
      }
    }
  }
  if (j.contains("boundary"))
  {
    const auto &b = j["boundary"];
    if (b.contains("u")) c.bc.u = dirichlet_from_json(b["u"], c.bc.u);
    if (b.contains("T")) c.bc.temperature = dirichlet_from_json(b["T"], c.bc.temperature);
    if (b.contains("phi")) c.bc.potential = dirichlet_from_json(b["phi"], c.bc.potential);
  }
  c.diffusivity = j.value("diffusivity", c.diffusivity);
  c.k_thermal = j.value("k_thermal", c.k_thermal);
  c.beta = j.value("beta", c.beta);
  c.max_retries = j.value("max_retries", c.max_retries);
  if (j.contains("picard"))
  {
    c.picard.tolerance = j["picard"].value("tolerance", c.picard.tolerance);
    c.picard.max_iterations = j["picard"].value("max_iterations", c.picard.max_iterations);
    c.picard.potential_time_order = j["picard"].value("potential_time_order", c.picard.potential_time_order);
  }
  c.validate();
  return c;
}

Benchmark Dataset::benchmark() const
{
  return parse_benchmark(manifest.at("config").at("benchmark").get<std::string>());
}

std::size_t Dataset::n_samples() const
{
  return manifest.at("n_samples").get<std::size_t>();
}

std::vector<std::string> Dataset::input_names() const
{
  return manifest.at("input_names").get<std::vector<std::string>>();
}

std::vector<std::string> Dataset::field_names() const
{
  return manifest.at("field_names").get<std::vector<std::string>>();
}

std::size_t Dataset::n_steps() const
{
  return manifest.at("config").at("scheme").at("n_steps").get<std::size_t>();
}

std::size_t Dataset::n_nodes() const
{
  return manifest.at("config").at("grid").at("n_nodes").get<std::size_t>();
}

bool Dataset::has_array(const std::string &name) const
{
  return std::any_of(arrays.begin(), arrays.end(), [&](const DatasetArray &a) { return a.name == name; });
}

const DatasetArray &Dataset::array(const std::string &name) const
{
  for (const auto &a : arrays)
  {
    if (a.name == name)
    {
      return a;
    }
  }
  throw InputError("dataset has no array '" + name + "'");
}

std::vector<ad::Tensor> Dataset::inputs(const std::vector<std::size_t> &samples) const
{
  std::vector<ad::Tensor> out;
  for (const auto &name : input_names())
  {
    const DatasetArray &a = array(name);
    const std::size_t s = a.shape[1];
    ad::Tensor t({samples.size(), s});
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
      for (std::size_t j = 0; j < s; ++j)
      {
        t[i * s + j] = a.data[samples[i] * s + j];
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> Dataset::field(std::size_t f, std::size_t sample) const
{
  const DatasetArray &a = array(field_names().at(f));
  const std::size_t p = a.shape[1] * a.shape[2];
  return std::vector<double>(a.data.begin() + static_cast<std::ptrdiff_t>(sample * p),
                             a.data.begin() + static_cast<std::ptrdiff_t>((sample + 1) * p));
}

nets::QueryBatch space_time_coords(const Dataset &d)
{
  const std::size_t steps = d.n_steps(), nodes = d.n_nodes();
  const fem::Grid1D grid(d.manifest.at("config").at("grid").at("n_elements").get<std::size_t>());
  fem::TimeScheme scheme;
  scheme.n_steps = steps;
  scheme.t_end = d.manifest.at("config").at("scheme").at("t_end").get<double>();
  nets::QueryBatch q;
  q.coords.resize(static_cast<Eigen::Index>(steps * nodes), 2);
  for (std::size_t s = 0; s < steps; ++s)
  {
    for (std::size_t n = 0; n < nodes; ++n)
    {
      const auto row = static_cast<Eigen::Index>(s * nodes + n);
      q.coords(row, 0) = grid.nodes()[n];
      q.coords(row, 1) = scheme.time(s);
    }
  }
  return q;
}

nets::TrainingData to_training_data(const Dataset &d)
{
  std::vector<std::size_t> all(d.n_samples());
  for (std::size_t i = 0; i < all.size(); ++i)
  {
    all[i] = i;
  }
  nets::TrainingData t;
  t.inputs = d.inputs(all);
  for (const auto &name : d.field_names())
  {
    const DatasetArray &a = d.array(name);
    const std::size_t p = a.shape[1] * a.shape[2];
    ad::Tensor f({a.shape[0], p});
    std::copy(a.data.begin(), a.data.end(), f.ptr());
    t.fields.push_back(std::move(f));
  }
  t.coords = space_time_coords(d);
  return t;
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t index, std::size_t attempt)
{
  const std::uint64_t s = field_gen::derive_seed(master_seed, index);
  return attempt == 0 ? s : field_gen::derive_seed(s, attempt);
}

std::vector<fem::FieldSolution> solve_sample(const DatasetConfig &config,
                                             const std::vector<field_gen::SampledFunction> &inputs,
                                             const fem::ReferenceFields *reference)
{
  const fem::Grid1D grid(config.n_elements);
  if (config.benchmark == Benchmark::reaction_diffusion)
  {
    fem::ReactionDiffusionInputs in{inputs.at(0), inputs.at(1), config.diffusivity};
    return {fem::solve_reaction_diffusion(grid, config.scheme, in, config.bc)};
  }
  fem::ThermoElectricalInputs in;
  in.q_ext = inputs.at(0);
  in.rho_e = inputs.at(1);
  in.k_thermal = config.k_thermal;
  in.beta = config.beta;
  if (config.benchmark == Benchmark::thermo_electrical_uncoupled)
  {
    if (reference == nullptr)
    {
      throw HarnessError("uncoupled generation needs reference fields");
    }
    in.coupling = fem::Coupling::uncoupled;
    in.reference_fields = *reference;
  }
  auto sol = fem::solve_thermo_electrical(grid, config.scheme, in, config.bc, config.picard);
  return {std::move(sol.temperature), std::move(sol.potential)};
}

fem::ReferenceFields nominal_reference(const DatasetConfig &config)
{
  const fem::Grid1D grid(config.n_elements);
  fem::ThermoElectricalInputs in;
  const std::vector<double> t = config.scheme.times();
  in.q_ext = {t, std::vector<double>(t.size(), spec_mean(config.inputs.at(0).spec))};
  in.rho_e = {t, std::vector<double>(t.size(), spec_mean(config.inputs.at(1).spec))};
  in.k_thermal = config.k_thermal;
  in.beta = config.beta;
  return fem::compute_reference_fields(grid, config.scheme, in, config.bc, config.picard);
}

Dataset generate_dataset(const DatasetConfig &config, std::size_t threads)
{
  config.validate();
  const bool thermo = is_thermo_electrical(config.benchmark);
  const std::size_t n = config.n_samples;
  const std::size_t steps = config.scheme.n_steps;
  const std::size_t nodes = 2 * config.n_elements + 1;
  const std::vector<std::string> field_names =
      thermo ? std::vector<std::string>{"T", "phi"} : std::vector<std::string>{"u"};

  std::optional<fem::ReferenceFields> reference;
  if (config.benchmark == Benchmark::thermo_electrical_uncoupled)
  {
    reference = nominal_reference(config);
  }

  struct Slot
  {
    std::vector<field_gen::SampledFunction> inputs;
    std::vector<fem::FieldSolution> fields;
    std::uint64_t seed = 0;
    std::size_t attempts = 0;
    std::string error;
  };
  std::vector<Slot> slots(n);
  parallel_for(n, threads,
               [&](std::size_t i)
               {
                 Slot &slot = slots[i];
                 for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt)
                 {
                   slot.attempts = attempt + 1;
                   slot.seed = sample_seed(config.master_seed, i, attempt);
                   slot.inputs.clear();
                   for (std::size_t j = 0; j < config.inputs.size(); ++j)
                   {
                     const auto &g = config.inputs[j];
                     const std::uint64_t s = g.fixed_seed ? *g.fixed_seed : field_gen::derive_seed(slot.seed, j + 1);
                     slot.inputs.push_back(field_gen::generate(with_seed(g.spec, s)));
                   }
                   try
                   {
                     slot.fields = solve_sample(config, slot.inputs, reference ? &*reference : nullptr);
                     slot.error.clear();
                     return;
                   }
                   catch (const SolverError &e)
                   {
                     slot.error = e.what();
                   }
                 }
               });

  std::vector<std::size_t> failed;
  nlohmann::json retries = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i)
  {
    if (!slots[i].error.empty())
    {
      failed.push_back(i);
    }
    else if (slots[i].attempts > 1)
    {
      retries.push_back({{"index", i}, {"attempts", slots[i].attempts}});
      std::clog << "gen-data: sample " << i << " regenerated after " << (slots[i].attempts - 1)
                << " solver failure(s)\n";
    }
  }
  if (!failed.empty())
  {
    std::string msg = "samples failed after " + std::to_string(config.max_retries) + " retries:";
    for (auto i : failed)
    {
      msg += " " + std::to_string(i) + " (" + slots[i].error + ")";
    }
    throw HarnessError(msg);
  }

  Dataset d;
  for (std::size_t j = 0; j < config.inputs.size(); ++j)
  {
    const std::size_t s = spec_points(config.inputs[j].spec);
    DatasetArray a{config.inputs[j].name, {n, s}, std::vector<float>(n * s)};
    for (std::size_t i = 0; i < n; ++i)
    {
      std::transform(slots[i].inputs[j].values.begin(), slots[i].inputs[j].values.end(), a.data.begin() + i * s,
                     [](double x) { return static_cast<float>(x); });
    }
    d.arrays.push_back(std::move(a));
  }
  for (std::size_t f = 0; f < field_names.size(); ++f)
  {
    DatasetArray a{field_names[f], {n, steps, nodes}, std::vector<float>(n * steps * nodes)};
    for (std::size_t i = 0; i < n; ++i)
    {
      const auto &v = slots[i].fields[f].values();
      std::transform(v.begin(), v.end(), a.data.begin() + i * steps * nodes,
                     [](double x) { return static_cast<float>(x); });
    }
    d.arrays.push_back(std::move(a));
  }
  nlohmann::json refs = nullptr;
  if (reference)
  {
    d.arrays.push_back({"reference_T", {steps, nodes}, to_float(reference->temperature.values())});
    d.arrays.push_back({"reference_phi", {steps, nodes}, to_float(reference->potential.values())});
    refs = {{"provenance", "coupled solve of constant dataset-mean inputs"},
            {"q_ext", spec_mean(config.inputs[0].spec)},
            {"rho_e", spec_mean(config.inputs[1].spec)},
            {"arrays", {"reference_T", "reference_phi"}}};
  }

  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    seeds[i] = slots[i].seed;
  }
  std::vector<std::string> input_names;
  for (const auto &in : config.inputs)
  {
    input_names.push_back(in.name);
  }
  d.manifest = {{"format_version", kFormatVersion},
                {"config", config},
                {"n_samples", n},
                {"input_names", input_names},
                {"field_names", field_names},
                {"sensor_domain", {{"axis", thermo ? "t" : "x"}, {"length", spec_length(config.inputs[0].spec)}}},
                {"sample_seeds", seeds},
                {"retries", retries},
                {"reference_fields", refs}};
  return d;
}

void save_dataset(const std::filesystem::path &dir, const Dataset &d)
{
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = d.manifest;
  nlohmann::json arrays = nlohmann::json::array();
  for (const auto &a : d.arrays)
  {
    const std::string file = array_file(a.name);
    io::write_f32_le(dir / file, a.data);
    arrays.push_back({{"name", a.name},
                      {"shape", a.shape},
                      {"dtype", "float32"},
                      {"byte_order", "little"},
                      {"layout", "row_major"},
                      {"file", file},
                      {"sha256", io::sha256_file(dir / file)}});
  }
  manifest["arrays"] = arrays;
  const nlohmann::json doc{{"manifest", manifest}, {"manifest_sha256", io::sha256_hex(manifest.dump())}};
  io::write_text(dir / kManifest, doc.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path &dir)
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse(io::read_text(dir / kManifest));
  }
  catch (const nlohmann::json::exception &e)
  {
    throw InputError("malformed dataset manifest: " + std::string(e.what()));
  }
  nlohmann::json manifest = doc.at("manifest");
  if (io::sha256_hex(manifest.dump()) != doc.at("manifest_sha256").get<std::string>())
  {
    throw InputError("dataset manifest hash mismatch");
  }
  if (manifest.value("format_version", 0) != kFormatVersion)
  {
    throw InputError("unsupported dataset format version");
  }
  Dataset d;
  for (const auto &a : manifest.at("arrays"))
  {
    const auto file = dir / a.at("file").get<std::string>();
    if (io::sha256_file(file) != a.at("sha256").get<std::string>())
    {
      throw InputError("array blob hash mismatch: " + file.string());
    }
    DatasetArray arr{a.at("name").get<std::string>(), a.at("shape").get<std::vector<std::size_t>>(),
                     io::read_f32_le(file)};
    std::size_t count = 1;
    for (auto s : arr.shape)
    {
      count *= s;
    }
    if (count != arr.data.size())
    {
      throw InputError("array '" + arr.name + "' size does not match its shape");
    }
    d.arrays.push_back(std::move(arr));
  }
  manifest.erase("arrays");
  d.manifest = std::move(manifest);
  if (d.n_samples() == 0)
  {
    throw InputError("dataset holds no samples");
  }
  for (const auto &name : d.input_names())
  {
    if (d.array(name).shape.size() != 2 || d.array(name).shape[0] != d.n_samples())
    {
      throw InputError("input array '" + name + "' does not match the manifest");
    }
  }
  for (const auto &name : d.field_names())
  {
    const auto &s = d.array(name).shape;
    if (s.size() != 3 || s[0] != d.n_samples() || s[1] != d.n_steps() || s[2] != d.n_nodes())
    {
      throw InputError("field array '" + name + "' does not match the manifest");
    }
  }
  return d;
}

}  // namespace opbench::harness
