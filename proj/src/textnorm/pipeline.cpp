#include "relforge/error.hpp"
#include "relforge/textnorm.hpp"
#include "textnorm/rules.hpp"
#include "unicode.hpp"

namespace relforge::textnorm {

namespace {

using detail::Text;

// Passes after which normalize gives up looking for a fixed point. Inputs
// seen in practice settle after one pass, adversarial ones after two or three.
constexpr int kMaxPasses = 8;

constexpr RuleId kBasicRules[] = {RuleId::kToLower, RuleId::kCleanContractions,
                                  RuleId::kRemoveControlChars};
constexpr RuleId kSymbolRules[] = {
    RuleId::kSymbolCleanup, RuleId::kFractionsToDecimals, RuleId::kNfkc,
    RuleId::kRangeMul, RuleId::kPercentTemp};
constexpr RuleId kEntityRules[] = {RuleId::kModelNames, RuleId::kNumberUnit,
                                   RuleId::kThousandSeparators};
constexpr RuleId kNoiseRules[] = {RuleId::kRemoveEmoji, RuleId::kSqueezeRepeats,
                                  RuleId::kTrimUnderscores,
                                  RuleId::kDedupeTokens, RuleId::kRemovePromo};

template <std::size_t N>
Text run_rules(Text text, const RuleId (&rules)[N], const NormConfig& config,
               NormStats* stats) {
  for (RuleId rule : rules) {
    if (!config.active(rule)) continue;
    Text next = detail::apply(rule, text, config);
    // Compatibility decompositions can produce capitals (U+3386 -> "MB");
    // fold them so lowercasing and NFKC compose to one case-free form.
    if (rule == RuleId::kNfkc && config.active(RuleId::kToLower)) {
      next = detail::to_lower(next);
    }
    if (stats != nullptr && next != text) {
      ++stats->changed[static_cast<std::size_t>(rule)];
    }
    text = std::move(next);
  }
  return text;
}

Text noise_pass(Text text, const NormConfig& config, NormStats* stats) {
  return detail::tidy_whitespace(run_rules(std::move(text), kNoiseRules, config, stats));
}

Text full_pass(Text text, const NormConfig& config, NormStats* stats) {
  text = run_rules(std::move(text), kBasicRules, config, stats);
  text = run_rules(std::move(text), kSymbolRules, config, stats);
  text = run_rules(std::move(text), kEntityRules, config, stats);
  return noise_pass(std::move(text), config, stats);
}

}  // namespace

std::string basic_normalize(std::string_view text, const NormConfig& config,
                            NormStats* stats) {
  return unicode::encode_utf8(
      run_rules(unicode::decode_utf8(text), kBasicRules, config, stats));
}

std::string symbol_normalize(std::string_view text) {
  static const NormConfig kDefault;
  return symbol_normalize(text, kDefault);
}

std::string symbol_normalize(std::string_view text, const NormConfig& config,
                             NormStats* stats) {
  return unicode::encode_utf8(
      run_rules(unicode::decode_utf8(text), kSymbolRules, config, stats));
}

std::string entity_normalize(std::string_view text, const NormConfig& config,
                             NormStats* stats) {
  return unicode::encode_utf8(
      run_rules(unicode::decode_utf8(text), kEntityRules, config, stats));
}

std::string reduce_noise(std::string_view text, const NormConfig& config,
                         NormStats* stats) {
  return unicode::encode_utf8(noise_pass(unicode::decode_utf8(text), config, stats));
}

std::string normalize(std::string_view text, const NormConfig& config,
                      NormStats* stats) {
  Text current = unicode::decode_utf8(text);
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    Text next = full_pass(current, config, stats);
    if (next == current) break;
    current = std::move(next);
  }
  return unicode::encode_utf8(current);
}

std::string apply_rule(std::string_view text, RuleId rule,
                       const NormConfig& config) {
  return unicode::encode_utf8(
      detail::apply(rule, unicode::decode_utf8(text), config));
}

std::string apply_rule(std::string_view text, std::string_view rule,
                       const NormConfig& config) {
  const auto id = rule_from_name(rule);
  if (!id) {
    throw ValidationError("unknown normalization rule '" + std::string(rule) + "'");
  }
  return apply_rule(text, *id, config);
}

}  // namespace relforge::textnorm
