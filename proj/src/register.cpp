#include "risknet/register.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "risknet/csv.hpp"
#include "risknet/diagnostics.hpp"
#include "risknet/random.hpp"

namespace risknet {

namespace {

constexpr std::array<std::string_view, 4> kFixedColumns = {"risk_id", "title", "firm_id",
                                                            "independent_impact"};

std::string cell_ref(std::size_t line, std::string_view column) {
  return "row at line " + std::to_string(line) + ", column '" + std::string(column) + "'";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

std::string_view to_string(Impact impact) {
  switch (impact) {
    case Impact::High: return "High";
    case Impact::Medium: return "Medium";
    case Impact::Low: return "Low";
  }
  return "Low";
}

std::optional<Impact> parse_impact(std::string_view text) {
  if (text == "High") return Impact::High;
  if (text == "Medium") return Impact::Medium;
  if (text == "Low") return Impact::Low;
  return std::nullopt;
}

RiskRegister::RiskRegister(std::vector<std::string> tag_names, std::vector<RiskRecord> risks)
    : tag_names_(std::move(tag_names)), risks_(std::move(risks)) {
  std::unordered_set<std::string> seen_tags;
  for (const auto& tag : tag_names_) {
    if (!seen_tags.insert(tag).second) throw InputError("duplicate tag name '" + tag + "'");
  }
  std::unordered_set<int> seen_ids;
  std::set<std::string> firms;
  for (const auto& risk : risks_) {
    if (risk.risk_id <= 0) {
      throw InputError("risk_id must be a positive integer, got " + std::to_string(risk.risk_id));
    }
    if (!seen_ids.insert(risk.risk_id).second) {
      throw InputError("duplicate risk_id " + std::to_string(risk.risk_id));
    }
    if (risk.characteristics.size() != tag_names_.size()) {
      throw InputError("risk " + std::to_string(risk.risk_id) + " has " +
                       std::to_string(risk.characteristics.size()) + " characteristics, expected " +
                       std::to_string(tag_names_.size()));
    }
    for (auto flag : risk.characteristics) {
      if (flag > 1) throw InputError("risk " + std::to_string(risk.risk_id) + " has a non-binary flag");
    }
    firms.insert(risk.firm_id);
  }
  firms_.assign(firms.begin(), firms.end());
  firm_index_.reserve(risks_.size());
  for (const auto& risk : risks_) {
    auto it = std::lower_bound(firms_.begin(), firms_.end(), risk.firm_id);
    firm_index_.push_back(static_cast<std::size_t>(it - firms_.begin()));
  }
}

std::optional<std::size_t> RiskRegister::index_of(int risk_id) const {
  for (std::size_t i = 0; i < risks_.size(); ++i) {
    if (risks_[i].risk_id == risk_id) return i;
  }
  return std::nullopt;
}

std::vector<int> RiskRegister::risk_ids() const {
  std::vector<int> ids;
  ids.reserve(risks_.size());
  for (const auto& r : risks_) ids.push_back(r.risk_id);
  return ids;
}

RiskRegister parse_register_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw InputError("register CSV is empty (header required)");

  const auto& header = rows.front().fields;
  if (header.size() < kFixedColumns.size()) {
    throw InputError("register header must start with risk_id,title,firm_id,independent_impact");
  }
  for (std::size_t c = 0; c < kFixedColumns.size(); ++c) {
    if (trim(header[c]) != kFixedColumns[c]) {
      throw InputError("register header column " + std::to_string(c + 1) + " must be '" +
                       std::string(kFixedColumns[c]) + "', found '" + header[c] + "'");
    }
  }
  std::vector<std::string> tags;
  for (std::size_t c = kFixedColumns.size(); c < header.size(); ++c) {
    std::string_view name = trim(header[c]);
    if (name.empty()) throw InputError("empty tag name in header column " + std::to_string(c + 1));
    tags.emplace_back(name);
  }

  std::vector<RiskRecord> risks;
  std::unordered_set<int> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw InputError("row at line " + std::to_string(row.line) + " has " +
                       std::to_string(row.fields.size()) + " columns, expected " +
                       std::to_string(header.size()));
    }
    RiskRecord rec;
    if (!parse_number(row.fields[0], rec.risk_id) || rec.risk_id <= 0) {
      throw InputError(cell_ref(row.line, "risk_id") + ": expected a positive integer, got '" +
                       row.fields[0] + "'");
    }
    if (!seen.insert(rec.risk_id).second) {
      throw InputError(cell_ref(row.line, "risk_id") + ": duplicate risk_id " +
                       std::to_string(rec.risk_id));
    }
    rec.title = row.fields[1];
    rec.firm_id = std::string(trim(row.fields[2]));
    if (rec.firm_id.empty()) throw InputError(cell_ref(row.line, "firm_id") + ": empty firm id");
    auto impact = parse_impact(trim(row.fields[3]));
    if (!impact) {
      throw InputError(cell_ref(row.line, "independent_impact") + ": unknown impact label '" +
                       row.fields[3] + "' (expected High, Medium or Low)");
    }
    rec.independent_impact = *impact;
    rec.characteristics.reserve(tags.size());
    for (std::size_t t = 0; t < tags.size(); ++t) {
      std::string_view cell = trim(row.fields[kFixedColumns.size() + t]);
      if (cell == "0") {
        rec.characteristics.push_back(0);
      } else if (cell == "1") {
        rec.characteristics.push_back(1);
      } else {
        throw InputError(cell_ref(row.line, tags[t]) + ": tag cell must be 0 or 1, got '" +
                         std::string(cell) + "'");
      }
    }
    risks.push_back(std::move(rec));
  }
  return RiskRegister(std::move(tags), std::move(risks));
}

RiskRegister load_register(const std::filesystem::path& path, RegisterFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open register file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  switch (format) {
    case RegisterFormat::Csv: return parse_register_csv(buf.str());
  }
  throw InputError("unsupported register format");
}

void write_register_csv(std::ostream& out, const RiskRegister& reg) {
  std::vector<std::string> fields(kFixedColumns.begin(), kFixedColumns.end());
  fields.insert(fields.end(), reg.tag_names().begin(), reg.tag_names().end());
  csv::write_row(out, fields);
  for (const auto& risk : reg.risks()) {
    fields.clear();
    fields.push_back(std::to_string(risk.risk_id));
    fields.push_back(risk.title);
    fields.push_back(risk.firm_id);
    fields.emplace_back(to_string(risk.independent_impact));
    for (auto flag : risk.characteristics) fields.push_back(flag ? "1" : "0");
    csv::write_row(out, fields);
  }
}

void save_register(const std::filesystem::path& path, const RiskRegister& reg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write register file " + path.string());
  write_register_csv(out, reg);
}

SyntheticSpec parse_synthetic_spec(std::string_view text, SyntheticSpec spec) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("synthetic spec line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string_view key = trim(view.substr(0, eq));
    std::string_view value = trim(view.substr(eq + 1));
    bool ok = false;
    if (key == "num_modules") ok = parse_number(value, spec.num_modules);
    else if (key == "risks_per_module") ok = parse_number(value, spec.risks_per_module);
    else if (key == "tags_per_module") ok = parse_number(value, spec.tags_per_module);
    else if (key == "total_tags") ok = parse_number(value, spec.total_tags);
    else if (key == "noise_rate") ok = parse_number(value, spec.noise_rate);
    else if (key == "firms") ok = parse_number(value, spec.firms);
    else if (key == "seed") ok = parse_number(value, spec.seed);
    else throw InputError("synthetic spec line " + std::to_string(lineno) + ": unknown key '" +
                          std::string(key) + "'");
    if (!ok) {
      throw InputError("synthetic spec line " + std::to_string(lineno) + ": bad value for '" +
                       std::string(key) + "'");
    }
  }
  return spec;
}

namespace {

std::string firm_label(int index, int count) {
  if (count <= 26) return std::string(1, static_cast<char>('A' + index));
  std::string digits = std::to_string(index + 1);
  std::string width = std::to_string(count);
  return "F" + std::string(width.size() - digits.size(), '0') + digits;
}

}  // namespace

SyntheticRegister synthesize_register(const SyntheticSpec& spec) {
  if (spec.num_modules <= 0 || spec.risks_per_module <= 0 || spec.tags_per_module <= 0 ||
      spec.firms <= 0 || spec.total_tags < 0) {
    throw InputError("synthetic spec: counts must be positive");
  }
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0)) {
    throw InputError("synthetic spec: noise_rate must lie in [0, 1]");
  }
  const long block_tags = static_cast<long>(spec.num_modules) * spec.tags_per_module;
  const long total = spec.total_tags == 0 ? block_tags : spec.total_tags;
  if (block_tags > total) {
    throw InputError("synthetic spec: " + std::to_string(block_tags) +
                     " block tags exceed the total tag count " + std::to_string(total));
  }

  std::vector<std::string> tags;
  tags.reserve(static_cast<std::size_t>(total));
  const std::string width = std::to_string(total);
  for (long t = 1; t <= total; ++t) {
    std::string digits = std::to_string(t);
    tags.push_back("tag_" + std::string(width.size() - digits.size(), '0') + digits);
  }

  Rng rng(derive_seed(spec.seed, {0x5157}));
  SyntheticRegister out;
  std::vector<RiskRecord> risks;
  int next_id = 1;
  for (int m = 0; m < spec.num_modules; ++m) {
    for (int r = 0; r < spec.risks_per_module; ++r) {
      RiskRecord rec;
      rec.risk_id = next_id++;
      rec.title = "Synthetic risk " + std::to_string(rec.risk_id) + " (class " +
                  std::to_string(m + 1) + ")";
      rec.firm_id = firm_label(static_cast<int>(uniform_index(rng, spec.firms)), spec.firms);
      rec.independent_impact = static_cast<Impact>(uniform_index(rng, 3));
      rec.characteristics.assign(static_cast<std::size_t>(total), 0);
      for (long t = 0; t < total; ++t) {
        const bool in_block = t >= static_cast<long>(m) * spec.tags_per_module &&
                              t < static_cast<long>(m + 1) * spec.tags_per_module;
        bool bit = in_block;
        if (uniform01(rng) < spec.noise_rate) bit = !bit;
        rec.characteristics[static_cast<std::size_t>(t)] = bit ? 1 : 0;
      }
      risks.push_back(std::move(rec));
      out.planted.push_back(m);
    }
  }
  out.reg = RiskRegister(std::move(tags), std::move(risks));
  return out;
}

ImpactCounts impact_counts(const RiskRegister& reg) {
  ImpactCounts counts;
  for (const auto& risk : reg.risks()) {
    switch (risk.independent_impact) {
      case Impact::High: ++counts.high; break;
      case Impact::Medium: ++counts.medium; break;
      case Impact::Low: ++counts.low; break;
    }
  }
  return counts;
}

}  // namespace risknet
