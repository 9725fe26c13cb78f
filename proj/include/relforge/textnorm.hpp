#pragma once

// Rule-based cleaning and normalization of queries, titles and category
// level names. Four rule groups run in a fixed order:
//
//   basic   : to_lower, clean_contractions, remove_control_chars
//   symbol  : symbol_cleanup, fractions_to_decimals, nfkc, range_mul,
//             percent_temp
//   entity  : model_names, number_unit, thousand_separators
//   noise   : remove_emoji, squeeze_repeats, trim_underscores,
//             dedupe_tokens, remove_promo
//
// Every operation is pure. NormConfig is immutable once constructed.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace relforge::textnorm {

enum class RuleId : std::uint8_t {
  kToLower,
  kCleanContractions,
  kRemoveControlChars,
  kSymbolCleanup,
  kFractionsToDecimals,
  kNfkc,
  kRangeMul,
  kPercentTemp,
  kModelNames,
  kNumberUnit,
  kThousandSeparators,
  kRemoveEmoji,
  kSqueezeRepeats,
  kTrimUnderscores,
  kDedupeTokens,
  kRemovePromo,
};

inline constexpr std::size_t kRuleCount = 16;

// Execution order of the full pipeline.
inline constexpr std::array<RuleId, kRuleCount> kCanonicalOrder = {
    RuleId::kToLower,          RuleId::kCleanContractions,
    RuleId::kRemoveControlChars, RuleId::kSymbolCleanup,
    RuleId::kFractionsToDecimals, RuleId::kNfkc,
    RuleId::kRangeMul,         RuleId::kPercentTemp,
    RuleId::kModelNames,       RuleId::kNumberUnit,
    RuleId::kThousandSeparators, RuleId::kRemoveEmoji,
    RuleId::kSqueezeRepeats,   RuleId::kTrimUnderscores,
    RuleId::kDedupeTokens,     RuleId::kRemovePromo,
};

enum class RuleGroup : std::uint8_t { kBasic, kSymbol, kEntity, kNoise };

std::string_view rule_name(RuleId rule);
std::optional<RuleId> rule_from_name(std::string_view name);
RuleGroup group_of(RuleId rule);

// Plain, mutable description of a configuration. Turned into an immutable,
// validated NormConfig before use.
struct NormSettings {
  std::vector<RuleId> enabled_rules;
  std::map<std::string, std::string> contractions;
  std::map<std::string, std::string> model_aliases;
  std::set<std::string> units;
  std::vector<std::string> promo_phrases;
  bool promo_enabled = false;

  static NormSettings defaults();
};

class NormConfig {
 public:
  // Default dictionaries, all rules enabled, promo removal off.
  NormConfig();
  // Throws ValidationError when an invariant does not hold.
  explicit NormConfig(NormSettings settings);

  // Keys absent from the JSON keep their default values.
  static NormConfig from_json(const nlohmann::json& j);
  static NormConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const NormSettings& settings() const noexcept { return settings_; }
  bool enabled(RuleId rule) const noexcept {
    return enabled_[static_cast<std::size_t>(rule)];
  }
  // Whether the pipeline runs `rule` (promo also needs promo_enabled).
  bool active(RuleId rule) const noexcept;

  struct Phrase {
    std::u32string from;
    std::u32string to;
  };
  // Dictionaries pre-decoded to code points, longest key first.
  const std::vector<Phrase>& contraction_table() const { return contractions_; }
  const std::vector<Phrase>& alias_table() const { return aliases_; }
  const std::vector<std::u32string>& unit_table() const { return units_; }
  const std::vector<std::u32string>& promo_table() const { return promos_; }

 private:
  NormSettings settings_;
  std::array<bool, kRuleCount> enabled_{};
  std::vector<Phrase> contractions_;
  std::vector<Phrase> aliases_;
  std::vector<std::u32string> units_;
  std::vector<std::u32string> promos_;
};

// Per-rule count of applications that changed the text.
struct NormStats {
  std::array<std::uint64_t, kRuleCount> changed{};

  void merge(const NormStats& other);
  nlohmann::json to_json() const;
};

std::string basic_normalize(std::string_view text, const NormConfig& config,
                            NormStats* stats = nullptr);
std::string symbol_normalize(std::string_view text);
std::string symbol_normalize(std::string_view text, const NormConfig& config,
                             NormStats* stats = nullptr);
std::string entity_normalize(std::string_view text, const NormConfig& config,
                             NormStats* stats = nullptr);
std::string reduce_noise(std::string_view text, const NormConfig& config,
                         NormStats* stats = nullptr);

// basic -> symbol -> entity -> noise, repeated until the text stops changing
// (a single pass for all but adversarial inputs). The result is a fixed point:
// normalize(normalize(s)) == normalize(s).
std::string normalize(std::string_view text, const NormConfig& config,
                      NormStats* stats = nullptr);

// Applies exactly one technique, regardless of enabled_rules/promo_enabled.
std::string apply_rule(std::string_view text, RuleId rule,
                       const NormConfig& config);
// Throws ValidationError for an unknown rule name.
std::string apply_rule(std::string_view text, std::string_view rule,
                       const NormConfig& config);

}  // namespace relforge::textnorm
