// risknet: risk-register network analysis from the command line.
//
//   risknet synth      --out register.csv [--modules 5 --risks-per-module 10 ...]
//   risknet analyze    --input register.csv --seed 42 --out results/
//   risknet robustness --input register.csv --seed 42 --out robustness/
//   risknet cascade    --input register.csv --seed 42 --risk 118
//
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "risknet/diagnostics.hpp"
#include "risknet/pipeline.hpp"
#include "risknet/register.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

std::vector<std::string> measure_names() {
  std::vector<std::string> names;
  for (auto measure : risknet::kAllMeasures) names.emplace_back(risknet::to_string(measure));
  return names;
}

struct TextOptions {
  std::string measure = "cosine";
  std::string mode = "resample";

  void apply(risknet::RunConfig& cfg) const {
    cfg.measure = *risknet::parse_measure(measure);
    cfg.mode = mode == "fixed" ? risknet::EnsembleMode::Fixed : risknet::EnsembleMode::Resample;
  }
};

void add_common(CLI::App* cmd, risknet::RunConfig& cfg, TextOptions& text, bool seed_required) {
  cmd->add_option("--input", cfg.input, "Risk register CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--measure", text.measure, "Similarity measure")
      ->check(CLI::IsMember(measure_names()))
      ->capture_default_str();
  cmd->add_option("--cascade-runs", cfg.cascade_runs, "Monte Carlo cascade runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* seed = cmd->add_option("--seed", cfg.seed, "Base seed for every random stream");
  if (seed_required) seed->required();
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--ensemble-mode", text.mode, "Cascade network per run: resample or fixed")
      ->check(CLI::IsMember({"resample", "fixed"}))
      ->capture_default_str();
}

void add_pipeline(CLI::App* cmd, risknet::RunConfig& cfg) {
  cmd->add_option("--ensemble-size", cfg.ensemble_size, "Networks per ensemble")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--restarts", cfg.restarts, "Louvain restarts per network")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", cfg.out, "Output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk network analysis: modules, systemic impact and robustness of a risk register"};
  app.require_subcommand(1);

  risknet::RunConfig cfg;
  TextOptions text;

  auto* analyze = app.add_subcommand("analyze", "Run the full single-measure analysis");
  add_common(analyze, cfg, text, true);
  add_pipeline(analyze, cfg);
  analyze->add_option("--top-k", cfg.top_k, "Rows in the emerging-risk report")->capture_default_str();
  analyze->add_option("--export-member", cfg.export_member, "Ensemble member exported as the sample network")
      ->capture_default_str();
  analyze->add_option("--baseline-samples", cfg.baseline_samples,
                      "Random modular baselines for the NMI check (0 disables; capped at the ensemble size)")
      ->capture_default_str();

  auto* robustness = app.add_subcommand("robustness", "Compare results across similarity measures");
  add_common(robustness, cfg, text, true);
  add_pipeline(robustness, cfg);
  std::vector<std::string> compared;
  robustness->add_option("--measures", compared, "Measures to compare (default: all)")->delimiter(',');
  robustness->add_option("--sensitivity-trials", cfg.sensitivity_trials, "Trials per sensitivity curve")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* cascade = app.add_subcommand("cascade", "Mean systemic impact of a single seed risk");
  add_common(cascade, cfg, text, true);
  int risk_id = 0;
  cascade->add_option("--risk", risk_id, "risk_id of the seed risk")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic planted-class register");
  risknet::SyntheticSpec spec;
  std::string spec_file;
  std::string synth_out;
  synth->add_option("--config", spec_file, "key=value file read before the flags")->check(CLI::ExistingFile);
  auto* o_modules = synth->add_option("--modules", spec.num_modules, "Planted classes");
  auto* o_rpm = synth->add_option("--risks-per-module", spec.risks_per_module, "Risks per class");
  auto* o_tpm = synth->add_option("--tags-per-module", spec.tags_per_module, "Tags switched on per class");
  auto* o_total = synth->add_option("--total-tags", spec.total_tags, "Total tags (0 = modules x tags per module)");
  auto* o_noise = synth->add_option("--noise", spec.noise_rate, "Independent bit-flip probability");
  auto* o_firms = synth->add_option("--firms", spec.firms, "Number of firms");
  auto* o_seed = synth->add_option("--seed", spec.seed, "Seed");
  synth->add_option("--out", synth_out, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  text.apply(cfg);

  try {
    if (*synth) {
      risknet::SyntheticSpec merged = spec;
      if (!spec_file.empty()) {
        std::ifstream in(spec_file);
        std::ostringstream text;
        text << in.rdbuf();
        merged = risknet::parse_synthetic_spec(text.str());
        // explicit flags win over the file
        if (*o_modules) merged.num_modules = spec.num_modules;
        if (*o_rpm) merged.risks_per_module = spec.risks_per_module;
        if (*o_tpm) merged.tags_per_module = spec.tags_per_module;
        if (*o_total) merged.total_tags = spec.total_tags;
        if (*o_noise) merged.noise_rate = spec.noise_rate;
        if (*o_firms) merged.firms = spec.firms;
        if (*o_seed) merged.seed = spec.seed;
      }
      const auto synthetic = risknet::synthesize_register(merged);
      if (synth_out.empty()) {
        risknet::write_register_csv(std::cout, synthetic.reg);
      } else {
        risknet::save_register(synth_out, synthetic.reg);
        std::cerr << "wrote " << synthetic.reg.size() << " risks to " << synth_out << '\n';
      }
    } else if (*analyze) {
      const auto manifest = risknet::run_analyze(cfg, &std::cerr);
      std::cerr << "wrote " << manifest["outputs"].size() + 1 << " files to " << cfg.out.string() << '\n';
    } else if (*robustness) {
      std::vector<risknet::Measure> measures;
      for (const auto& name : compared) {
        auto m = risknet::parse_measure(name);
        if (!m) throw risknet::InputError("unknown measure '" + name + "'");
        measures.push_back(*m);
      }
      if (measures.empty()) measures.assign(risknet::kAllMeasures.begin(), risknet::kAllMeasures.end());
      risknet::run_robustness(cfg, measures, &std::cerr);
      std::cerr << "wrote robustness report to " << cfg.out.string() << '\n';
    } else if (*cascade) {
      const auto result = risknet::run_single_cascade(cfg, risk_id);
      std::cout << "risk_id,measure,ensemble_mode,seed,runs,mean_systemic_impact\n"
                << result.risk_id << ',' << risknet::to_string(cfg.measure) << ','
                << risknet::to_string(cfg.mode) << ',' << cfg.seed << ',' << result.runs << ','
                << result.mean_impact << '\n';
    }
  } catch (const risknet::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
