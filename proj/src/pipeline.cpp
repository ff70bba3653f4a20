#include "risknet/pipeline.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "risknet/diagnostics.hpp"

namespace risknet {

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig pc;
  pc.ensemble_size = ensemble_size;
  pc.cascade_runs = cascade_runs;
  pc.restarts = restarts;
  pc.seed = seed;
  pc.mode = mode;
  pc.threads = threads;
  return pc;
}

void RunConfig::check() const {
  if (ensemble_size < 1) throw InputError("ensemble size must be at least 1");
  if (cascade_runs < 1) throw InputError("cascade runs must be at least 1");
  if (restarts < 1) throw InputError("restarts must be at least 1");
  if (sensitivity_trials < 1) throw InputError("sensitivity trials must be at least 1");
  if (export_member >= ensemble_size) {
    throw InputError("export member " + std::to_string(export_member) + " is outside an ensemble of " +
                     std::to_string(ensemble_size));
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256 computation failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
  return hex.str();
}

namespace {

template <class F>
auto stage(std::string_view name, std::ostream* log, F&& body) -> decltype(body()) {
  if (log) *log << "[" << name << "]\n" << std::flush;
  try {
    return body();
  } catch (const InputError& e) {
    throw InputError(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

// Collects output files so the manifest can hash exactly what was written.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    std::ostringstream buf;
    fill(buf);
    const std::string bytes = buf.str();
    std::ofstream out(dir_ / name, std::ios::binary);
    out << bytes;
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    hashes_[name] = sha256_hex(bytes);
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }

  const nlohmann::json& hashes() const { return hashes_; }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json hashes_ = nlohmann::json::object();
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open register file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"input", c.input.filename().string()},
          {"measure", to_string(c.measure)},
          {"ensemble_size", c.ensemble_size},
          {"cascade_runs", c.cascade_runs},
          {"restarts", c.restarts},
          {"seed", c.seed},
          {"ensemble_mode", to_string(c.mode)},
          {"top_k", c.top_k},
          {"export_member", c.export_member},
          {"baseline_samples", c.baseline_samples},
          {"sensitivity_trials", c.sensitivity_trials}};
}

std::vector<NodeAttributes> node_attributes(const RiskRegister& reg, const Assignment& modules,
                                            const std::vector<Impact>& classes) {
  std::vector<NodeAttributes> nodes;
  nodes.reserve(reg.size());
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const auto& r = reg[i];
    nodes.push_back({r.risk_id, r.title, r.firm_id, modules[i] + 1, std::string(to_string(r.independent_impact)),
                     std::string(to_string(classes[i]))});
  }
  return nodes;
}

}  // namespace

nlohmann::json run_analyze(const RunConfig& config, std::ostream* log) {
  config.check();
  const std::string raw = stage("load", log, [&] { return read_file(config.input); });
  const RiskRegister reg = stage("parse", log, [&] { return parse_register_csv(raw); });
  if (reg.empty()) throw InputError("load: register has no risks");
  const auto ids = reg.risk_ids();
  const PipelineConfig pc = config.pipeline();

  const MeasureAnalysis run = stage("pipeline", log, [&] { return analyze_measure(reg, config.measure, pc); });
  const auto& partition = run.consensus.partition;
  const WeightedGraph& sample = run.ensemble.graphs[config.export_member];

  ValidationReport validation = stage("validation", log, [&] {
    ValidationReport v = validate(sample, partition);
    if (config.baseline_samples > 0) {
      const std::size_t k = std::min(config.baseline_samples, run.ensemble.graphs.size());
      v.nmi_vs_random = nmi_vs_random(std::span(run.ensemble.graphs).first(k),
                                      std::span(run.consensus.members).first(k), derive_seed(config.seed, {2}),
                                      config.restarts, config.threads);
    }
    return v;
  });

  const HorizonTable horizon = stage("horizon", log, [&] { return horizon_table(reg, partition.assignment); });
  const LiabilityNetwork liability = stage("liability", log, [&] { return liability_network(reg, run.cascades); });
  const auto emerging = stage("emerging", log, [&] { return emerging_risk_report(run.summary, reg, config.top_k); });

  return stage("write", log, [&] {
    OutputDir out(config.out);
    out.write("similarity_matrix.csv", [&](std::ostream& o) { write_similarity_csv(o, run.similarity, ids); });
    out.write("expected_weights.csv", [&](std::ostream& o) { write_expected_weight_csv(o, run.similarity, ids); });
    out.write("network_edges.csv", [&](std::ostream& o) { write_edge_list_csv(o, sample, ids); });
    const auto nodes = node_attributes(reg, partition.assignment, run.summary.systemic_class);
    out.write("network.graphml", [&](std::ostream& o) { write_graphml(o, sample, nodes); });
    out.write("partition.csv",
              [&](std::ostream& o) { write_partition_csv(o, partition, run.consensus.confidence, ids); });

    nlohmann::json vj = to_json(validation);
    vj["graph_member"] = config.export_member;
    vj["module_sizes"] = partition.module_sizes();
    vj["mean_modularity"] = partition.q;
    out.write_json("validation.json", vj);

    out.write("cascade_summary.csv", [&](std::ostream& o) { write_cascade_csv(o, run.summary, reg); });
    out.write("horizon_table.csv", [&](std::ostream& o) { write_horizon_csv(o, horizon); });
    out.write("horizon_table.md", [&](std::ostream& o) { write_horizon_markdown(o, horizon); });
    out.write_json("horizon_table.json", to_json(horizon));
    out.write_json("liability_network.json", to_json(liability));
    out.write("liability_edges.csv", [&](std::ostream& o) { write_liability_csv(o, liability); });
    out.write("emerging_risks.csv", [&](std::ostream& o) { write_emerging_csv(o, emerging); });
    out.write_json("emerging_risks.json", to_json(std::span<const EmergingRiskRow>(emerging)));

    nlohmann::json manifest;
    manifest["command"] = "analyze";
    manifest["seed"] = config.seed;
    manifest["measure"] = to_string(config.measure);
    manifest["config"] = config_json(config);
    manifest["input_sha256"] = sha256_hex(raw);
    manifest["mismatch"] = {{"systemic_ge_independent", run.mismatch.systemic_at_least_independent},
                            {"systemic_lt_independent", run.mismatch.systemic_below_independent}};
    manifest["outputs"] = out.hashes();
    out.write_json("manifest.json", manifest);
    return manifest;
  });
}

nlohmann::json run_robustness(const RunConfig& config, const std::vector<Measure>& measures,
                              std::ostream* log) {
  config.check();
  const std::string raw = stage("load", log, [&] { return read_file(config.input); });
  const RiskRegister reg = stage("parse", log, [&] { return parse_register_csv(raw); });
  if (reg.empty()) throw InputError("load: register has no risks");

  const RobustnessReport report = stage("robustness", log, [&] {
    return robustness_suite(reg, measures, config.pipeline(), config.sensitivity_trials);
  });

  return stage("write", log, [&] {
    OutputDir out(config.out);
    out.write("mismatch_by_measure.csv", [&](std::ostream& o) { write_mismatch_csv(o, report); });
    out.write("module_match.csv", [&](std::ostream& o) { write_match_csv(o, report); });
    out.write("sensitivity_curves.csv", [&](std::ostream& o) { write_sensitivity_csv(o, report); });
    out.write_json("robustness.json", to_json(report));

    nlohmann::json manifest;
    manifest["command"] = "robustness";
    manifest["seed"] = config.seed;
    auto& ms = manifest["measures"] = nlohmann::json::array();
    for (const auto& o : report.outcomes) ms.push_back(to_string(o.measure));
    manifest["config"] = config_json(config);
    manifest["input_sha256"] = sha256_hex(raw);
    manifest["outputs"] = out.hashes();
    out.write_json("manifest.json", manifest);
    return manifest;
  });
}

WhatIfResult run_single_cascade(const RunConfig& config, int risk_id) {
  if (config.cascade_runs < 1) throw InputError("cascade runs must be at least 1");
  const RiskRegister reg = load_register(config.input);
  const auto index = reg.index_of(risk_id);
  if (!index) throw InputError("risk_id " + std::to_string(risk_id) + " is not in the register");
  const SimilarityMatrix sim = similarity_matrix(reg, config.measure);
  CascadeConfig cc;
  cc.runs = config.cascade_runs;
  cc.base_seed = config.seed;
  cc.mode = config.mode;
  cc.threads = config.threads;

  // Same streams as simulate_cascades, restricted to one seed risk.
  const WeightedGraph fixed = config.mode == EnsembleMode::Fixed ? similarity_graph(sim) : WeightedGraph{};
  std::uint64_t total = 0;
  for (std::size_t run = 0; run < cc.runs; ++run) {
    WeightedGraph sampled;
    if (cc.mode == EnsembleMode::Resample) sampled = sample_graph(sim, member_seed(cc.base_seed, run));
    const WeightedGraph& g = cc.mode == EnsembleMode::Resample ? sampled : fixed;
    Rng rng = cascade_stream(cc.base_seed, *index, run);
    total += run_cascade(g, *index, rng);
  }
  return {risk_id, static_cast<double>(total) / static_cast<double>(cc.runs), cc.runs};
}

}  // namespace risknet
