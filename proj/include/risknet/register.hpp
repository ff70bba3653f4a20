#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace risknet {

/// Qualitative impact level. Ordinal: Low < Medium < High.
enum class Impact : std::uint8_t { Low = 0, Medium = 1, High = 2 };

std::string_view to_string(Impact impact);
/// Accepts exactly "High", "Medium" or "Low".
std::optional<Impact> parse_impact(std::string_view text);

using Characteristics = std::vector<std::uint8_t>;

struct RiskRecord {
  int risk_id = 0;
  std::string title;
  std::string firm_id;
  Impact independent_impact = Impact::Low;
  Characteristics characteristics;

  bool operator==(const RiskRecord&) const = default;
};

/// Immutable, validated collection of risks over a fixed tag set.
class RiskRegister {
 public:
  RiskRegister() = default;
  /// Throws InputError if an invariant is violated (duplicate ids or tags,
  /// non-positive ids, wrong vector length, flags other than 0/1).
  RiskRegister(std::vector<std::string> tag_names, std::vector<RiskRecord> risks);

  const std::vector<std::string>& tag_names() const { return tag_names_; }
  const std::vector<RiskRecord>& risks() const { return risks_; }
  const RiskRecord& operator[](std::size_t index) const { return risks_[index]; }
  std::size_t size() const { return risks_.size(); }
  bool empty() const { return risks_.empty(); }
  std::size_t tag_count() const { return tag_names_.size(); }

  /// Sorted, distinct firm labels.
  const std::vector<std::string>& firms() const { return firms_; }
  /// Index into firms() for each risk, in row order.
  const std::vector<std::size_t>& firm_index() const { return firm_index_; }

  std::optional<std::size_t> index_of(int risk_id) const;
  std::vector<int> risk_ids() const;

  bool operator==(const RiskRegister& other) const {
    return tag_names_ == other.tag_names_ && risks_ == other.risks_;
  }

 private:
  std::vector<std::string> tag_names_;
  std::vector<RiskRecord> risks_;
  std::vector<std::string> firms_;
  std::vector<std::size_t> firm_index_;
};

enum class RegisterFormat { Csv };

RiskRegister parse_register_csv(std::string_view text);
RiskRegister load_register(const std::filesystem::path& path,
                           RegisterFormat format = RegisterFormat::Csv);

/// Canonical CSV: risk_id,title,firm_id,independent_impact,<tags...>
void write_register_csv(std::ostream& out, const RiskRegister& reg);
void save_register(const std::filesystem::path& path, const RiskRegister& reg);

struct SyntheticSpec {
  int num_modules = 5;
  int risks_per_module = 10;
  int tags_per_module = 4;
  /// Total tag count; 0 means num_modules * tags_per_module.
  int total_tags = 0;
  double noise_rate = 0.05;
  int firms = 5;
  std::uint64_t seed = 1;
};

/// Parses "key=value" lines ('#' comments allowed) on top of the defaults.
SyntheticSpec parse_synthetic_spec(std::string_view text, SyntheticSpec base = {});

struct SyntheticRegister {
  RiskRegister reg;
  /// Planted class of each risk, 0-based, in row order.
  std::vector<int> planted;
};

/// Planted-class register: class m switches on tag block m, then every bit
/// flips independently with probability noise_rate.
SyntheticRegister synthesize_register(const SyntheticSpec& spec);

struct ImpactCounts {
  std::size_t high = 0;
  std::size_t medium = 0;
  std::size_t low = 0;

  std::size_t total() const { return high + medium + low; }
  bool operator==(const ImpactCounts&) const = default;
};

ImpactCounts impact_counts(const RiskRegister& reg);

}  // namespace risknet
