#pragma once

#include <string>
#include <vector>

#include "relforge/textnorm.hpp"

namespace relforge::textnorm::detail {

using Text = std::u32string;
using PhraseTable = std::vector<NormConfig::Phrase>;

Text to_lower(const Text& text);
Text clean_contractions(const Text& text, const PhraseTable& contractions);
Text remove_control_chars(const Text& text);
Text symbol_cleanup(const Text& text);
Text fractions_to_decimals(const Text& text);
Text nfkc(const Text& text);
Text range_mul(const Text& text);
Text percent_temp(const Text& text);
Text model_names(const Text& text, const PhraseTable& aliases);
Text number_unit(const Text& text, const std::vector<Text>& units);
Text thousand_separators(const Text& text);
Text remove_emoji(const Text& text);
Text squeeze_repeats(const Text& text);
Text trim_underscores(const Text& text);
Text dedupe_tokens(const Text& text);
Text remove_promo(const Text& text, const std::vector<Text>& phrases);

// Collapses whitespace runs to one space and trims both ends.
Text tidy_whitespace(const Text& text);

Text apply(RuleId rule, const Text& text, const NormConfig& config);

}  // namespace relforge::textnorm::detail
