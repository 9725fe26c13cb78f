#include "relforge/textnorm.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <string>

#include "relforge/error.hpp"
#include "support/text_gen.hpp"
#include "unicode.hpp"

namespace relforge::textnorm {
namespace {

const NormConfig& Default() {
  static const NormConfig config;
  return config;
}

NormConfig WithPromo() {
  NormSettings s = NormSettings::defaults();
  s.promo_enabled = true;
  return NormConfig(std::move(s));
}

//===----------------------------------------------------------------------===//
// Reference examples, one technique at a time
//===----------------------------------------------------------------------===//

struct Golden {
  RuleId rule;
  const char* before;
  const char* after;
};

class GoldenRuleTest : public ::testing::TestWithParam<Golden> {};

TEST_P(GoldenRuleTest, ReproducedBitExactly) {
  const Golden& g = GetParam();
  EXPECT_EQ(apply_rule(g.before, g.rule, Default()), g.after)
      << rule_name(g.rule);
}

INSTANTIATE_TEST_SUITE_P(
    ReferenceTable, GoldenRuleTest,
    ::testing::Values(
        Golden{RuleId::kToLower, "iPhone 13 Pro", "iphone 13 pro"},
        Golden{RuleId::kCleanContractions, "it's", "it is"},
        Golden{RuleId::kSymbolCleanup, "“smart quote”", "\"smart quote\""},
        Golden{RuleId::kNfkc, "６４ＧＢ", "64GB"},
        Golden{RuleId::kFractionsToDecimals, "½ inch", "0.5 inch"},
        Golden{RuleId::kRangeMul, "5~10 x 5", "5-10 * 5"},
        Golden{RuleId::kPercentTemp, "23°C", "23c"},
        Golden{RuleId::kModelNames, "i-phone", "iphone"},
        Golden{RuleId::kModelNames, "I phone", "iphone"},
        Golden{RuleId::kNumberUnit, "64 GB", "64gb"},
        Golden{RuleId::kNumberUnit, "5000 mAh", "5000mah"},
        Golden{RuleId::kThousandSeparators, "1,024", "1024"},
        Golden{RuleId::kSqueezeRepeats, "helllooo", "hello"},
        Golden{RuleId::kDedupeTokens, "new new", "new"}));

//===----------------------------------------------------------------------===//
// Group operations
//===----------------------------------------------------------------------===//

TEST(BasicNormalizeTest, Examples) {
  EXPECT_EQ(basic_normalize("iPhone 13 Pro", Default()), "iphone 13 pro");
  EXPECT_EQ(basic_normalize("it's", Default()), "it is");
  EXPECT_EQ(basic_normalize("abc", Default()), "abc");
}

TEST(BasicNormalizeTest, RemovesInvisibleCharacters) {
  EXPECT_EQ(basic_normalize("a\u200Bb\u00ADc\x01", Default()), "abc");
  EXPECT_EQ(basic_normalize("a\tb\nc", Default()), "a b c");
}

TEST(BasicNormalizeTest, ContractionsRespectWordBoundaries) {
  EXPECT_EQ(basic_normalize("Don't stop", Default()), "do not stop");
  EXPECT_EQ(basic_normalize("it’s", Default()), "it is");
  EXPECT_EQ(basic_normalize("bit's", Default()), "bit's");
}

TEST(SymbolNormalizeTest, Examples) {
  EXPECT_EQ(symbol_normalize("“smart quote”"), "\"smart quote\"");
  EXPECT_EQ(symbol_normalize("½ inch"), "0.5 inch");
  EXPECT_EQ(symbol_normalize("5~10 x 5"), "5-10 * 5");
  EXPECT_EQ(symbol_normalize("23°C"), "23c");
  EXPECT_EQ(symbol_normalize(""), "");
}

TEST(SymbolNormalizeTest, FractionsSurviveCompatibilityDecomposition) {
  // NFKC alone would turn "3¼" into "31⁄4".
  EXPECT_EQ(symbol_normalize("3¼"), "3.25");
  EXPECT_EQ(symbol_normalize("⅔ cup"), "0.667 cup");
  EXPECT_EQ(apply_rule("1⁄2", RuleId::kFractionsToDecimals, Default()), "0.5");
  EXPECT_EQ(apply_rule("1⁄0", RuleId::kFractionsToDecimals, Default()), "1⁄0");
}

TEST(SymbolNormalizeTest, RangeAndMultiplication) {
  EXPECT_EQ(symbol_normalize("5 ∼ 10"), "5-10");
  EXPECT_EQ(symbol_normalize("1920x1080"), "1920*1080");
  EXPECT_EQ(symbol_normalize("2 × 3"), "2 * 3");
  EXPECT_EQ(symbol_normalize("box 5"), "box 5");
  EXPECT_EQ(symbol_normalize("5 xl 6"), "5 xl 6");
}

TEST(SymbolNormalizeTest, PercentKeptAttached) {
  EXPECT_EQ(symbol_normalize("50 %"), "50%");
  EXPECT_EQ(symbol_normalize("50％ off"), "50% off");
  EXPECT_EQ(symbol_normalize("20℃"), "20c");
  EXPECT_EQ(symbol_normalize("90° angle"), "90° angle");
}

TEST(EntityNormalizeTest, Examples) {
  EXPECT_EQ(entity_normalize("i-phone", Default()), "iphone");
  EXPECT_EQ(entity_normalize("5000 mah", Default()), "5000mah");
  EXPECT_EQ(entity_normalize("1,024", Default()), "1024");
  EXPECT_EQ(entity_normalize("tablet", Default()), "tablet");
}

TEST(EntityNormalizeTest, ThousandSeparatorsNeedThreeDigitGroups) {
  EXPECT_EQ(entity_normalize("1,5", Default()), "1,5");
  EXPECT_EQ(entity_normalize("1,234,567 units", Default()), "1234567 units");
  EXPECT_EQ(entity_normalize("12,345,67", Default()), "12,345,67");
  EXPECT_EQ(entity_normalize("1,024, 2,048", Default()), "1024, 2048");
}

TEST(EntityNormalizeTest, UnitsNeedAWordBoundary) {
  EXPECT_EQ(entity_normalize("64 gbps", Default()), "64 gbps");
  EXPECT_EQ(entity_normalize("2 in 1", Default()), "2 in 1");
  EXPECT_EQ(entity_normalize("15.6 inch", Default()), "15.6inch");
  EXPECT_EQ(entity_normalize("5 ghz", Default()), "5ghz");
}

TEST(ReduceNoiseTest, Examples) {
  EXPECT_EQ(reduce_noise("helllooo", Default()), "hello");
  EXPECT_EQ(reduce_noise("new new", Default()), "new");
  EXPECT_EQ(reduce_noise("_sale_", Default()), "sale");
}

TEST(ReduceNoiseTest, EmojiAndWhitespace) {
  EXPECT_EQ(reduce_noise("great\U0001F600\U0001F600product", Default()),
            "great product");
  EXPECT_EQ(reduce_noise("  thumbs \U0001F44D\U0001F3FD  up ", Default()),
            "thumbs up");
  EXPECT_EQ(reduce_noise("\U0001F1F0\U0001F1F7 flag", Default()), "flag");
}

TEST(ReduceNoiseTest, SqueezeNeverTouchesDigits) {
  EXPECT_EQ(reduce_noise("5000 mahhh", Default()), "5000 mah");
  EXPECT_EQ(reduce_noise("coooool", Default()), "cool");
}

TEST(ReduceNoiseTest, PromoRemovalIsOptional) {
  EXPECT_EQ(reduce_noise("free shipping earbuds", Default()),
            "free shipping earbuds");
  EXPECT_EQ(reduce_noise("free shipping earbuds", WithPromo()), "earbuds");
  EXPECT_EQ(reduce_noise("free free shipping shipping case", WithPromo()), "case");
}

//===----------------------------------------------------------------------===//
// Full pipeline
//===----------------------------------------------------------------------===//

TEST(NormalizeTest, Examples) {
  EXPECT_EQ(normalize("It's ６４ＧＢ", Default()), "it is 64gb");
  EXPECT_EQ(normalize("iphone 13 pro", Default()), "iphone 13 pro");
  EXPECT_EQ(normalize("Free Shipping wireless earbuds", WithPromo()),
            "wireless earbuds");
}

TEST(NormalizeTest, CompatibilityUppercaseIsFolded) {
  // U+3386 SQUARE MB decomposes to uppercase "MB".
  EXPECT_EQ(normalize("128㎆", Default()), "128mb");
}

TEST(NormalizeTest, RespectsEnabledRules) {
  NormSettings s = NormSettings::defaults();
  s.enabled_rules = {RuleId::kToLower};
  const NormConfig lower_only(std::move(s));
  EXPECT_EQ(normalize("It's  64 GB", lower_only), "it's 64 gb");
}

TEST(NormalizeTest, StatsCountChangedApplications) {
  NormStats stats;
  normalize("iPhone  64 GB", Default(), &stats);
  normalize("plain", Default(), &stats);
  EXPECT_EQ(stats.changed[static_cast<std::size_t>(RuleId::kToLower)], 1u);
  EXPECT_EQ(stats.changed[static_cast<std::size_t>(RuleId::kNumberUnit)], 1u);
  EXPECT_EQ(stats.changed[static_cast<std::size_t>(RuleId::kNfkc)], 0u);
  EXPECT_EQ(stats.to_json()["number_unit"], 1);
}

TEST(NormalizeTest, InvalidUtf8IsDropped) {
  EXPECT_EQ(normalize("ab\xFF\xFE" "c", Default()), "abc");
}

//===----------------------------------------------------------------------===//
// Properties
//===----------------------------------------------------------------------===//

TEST(NormalizePropertyTest, Idempotent) {
  const NormConfig promo = WithPromo();
  testing::TextGenerator gen(20251014);
  for (int i = 0; i < 10000; ++i) {
    const std::string s = gen.next();
    const NormConfig& config = (i % 2 == 0) ? Default() : promo;
    const std::string once = normalize(s, config);
    ASSERT_EQ(normalize(once, config), once) << "input: " << s;
  }
}

TEST(NormalizePropertyTest, Totality) {
  testing::TextGenerator gen(7);
  for (int i = 0; i < 5000; ++i) {
    const std::string s = gen.next();
    const std::u32string out = unicode::decode_utf8(normalize(s, Default()));
    for (std::size_t k = 0; k < out.size(); ++k) {
      const char32_t c = out[k];
      ASSERT_FALSE(unicode::is_control(c)) << s;
      ASSERT_FALSE(unicode::is_emoji(c)) << s;
      ASSERT_FALSE(unicode::is_fullwidth_form(c)) << s;
      if (k >= 2 && unicode::is_alpha(c)) {
        ASSERT_FALSE(out[k - 1] == c && out[k - 2] == c) << s;
      }
    }
  }
}

TEST(NormalizePropertyTest, BareDigitRunsSurvive) {
  testing::TextGenerator gen(99);
  const std::regex digits("[0-9]+");
  for (int i = 0; i < 2000; ++i) {
    const std::string s = gen.next_digit_safe();
    const std::string out = normalize(s, Default());
    for (auto it = std::sregex_iterator(s.begin(), s.end(), digits);
         it != std::sregex_iterator(); ++it) {
      ASSERT_NE(out.find(it->str()), std::string::npos)
          << "'" << it->str() << "' lost from '" << s << "' -> '" << out << "'";
    }
  }
}

TEST(NormalizePropertyTest, Deterministic) {
  testing::TextGenerator a(5);
  testing::TextGenerator b(5);
  for (int i = 0; i < 500; ++i) {
    EXPECT_EQ(normalize(a.next(), Default()), normalize(b.next(), Default()));
  }
}

//===----------------------------------------------------------------------===//
// Configuration
//===----------------------------------------------------------------------===//

TEST(NormConfigTest, UnknownRuleNameIsRejected) {
  EXPECT_THROW(apply_rule("abc", "no_such_rule", Default()), ValidationError);
  EXPECT_EQ(apply_rule("abc", "remove_emoji", Default()), "abc");
}

TEST(NormConfigTest, EnabledRulesMustFollowCanonicalOrder) {
  NormSettings s = NormSettings::defaults();
  s.enabled_rules = {RuleId::kNfkc, RuleId::kToLower};
  EXPECT_THROW(NormConfig{s}, ValidationError);
  s.enabled_rules = {RuleId::kToLower, RuleId::kToLower};
  EXPECT_THROW(NormConfig{s}, ValidationError);
}

TEST(NormConfigTest, DictionaryInvariants) {
  NormSettings s = NormSettings::defaults();
  s.contractions["It's"] = "it is";
  EXPECT_THROW(NormConfig{s}, ValidationError);

  s = NormSettings::defaults();
  s.units.insert("4k");
  EXPECT_THROW(NormConfig{s}, ValidationError);

  s = NormSettings::defaults();
  s.model_aliases["phone"] = "smart phone";
  EXPECT_THROW(NormConfig{s}, ValidationError);
}

TEST(NormConfigTest, JsonOverlaysDefaults) {
  const auto config = NormConfig::from_json(nlohmann::json{
      {"promo_enabled", true},
      {"promo_phrases", {"mega deal"}},
      {"enabled_rules", {"to_lower", "remove_promo"}},
  });
  EXPECT_TRUE(config.active(RuleId::kRemovePromo));
  EXPECT_FALSE(config.enabled(RuleId::kNfkc));
  EXPECT_EQ(config.settings().contractions.at("it's"), "it is");
  EXPECT_EQ(normalize("MEGA deal Lamp", config), "lamp");
  EXPECT_EQ(NormConfig::from_json(config.to_json()).to_json(), config.to_json());
}

TEST(NormConfigTest, JsonRejectsUnknownRules) {
  EXPECT_THROW(NormConfig::from_json({{"enabled_rules", {"stemming"}}}),
               ValidationError);
  EXPECT_THROW(NormConfig::from_json({{"units", 5}}), ValidationError);
}

}  // namespace
}  // namespace relforge::textnorm
