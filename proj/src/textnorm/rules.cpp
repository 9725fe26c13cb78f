#include "textnorm/rules.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

#include "relforge/error.hpp"
#include "unicode.hpp"

namespace relforge::textnorm::detail {

namespace {

constexpr std::size_t npos = Text::npos;

bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

char32_t ascii_lower(char32_t c) {
  return (c >= U'A' && c <= U'Z') ? c + (U'a' - U'A') : c;
}

// Characters that end up as ASCII "'" after symbol_cleanup or NFKC.
bool is_apostrophe(char32_t c) {
  switch (c) {
    case U'\'':
    case 0x2018:
    case 0x2019:
    case 0x201A:
    case 0x201B:
    case 0x2039:
    case 0x203A:
    case 0x02BC:
    case 0xFF07:
      return true;
    default:
      return false;
  }
}

bool boundary_before(const Text& text, std::size_t pos) {
  return pos == 0 || !unicode::is_alnum(text[pos - 1]);
}

bool boundary_after(const Text& text, std::size_t end) {
  return end >= text.size() || !unicode::is_alnum(text[end]);
}

struct MatchOptions {
  bool fold_apostrophes = false;
  bool flexible_spaces = false;
  bool ascii_case_insensitive = false;
  bool case_insensitive = false;
};

// Matches `pattern` at `pos`; returns the end offset or npos. A space in the
// pattern matches any non-empty whitespace run when flexible_spaces is set.
std::size_t match_at(const Text& text, std::size_t pos, const Text& pattern,
                     MatchOptions opts) {
  std::size_t i = pos;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    const char32_t p = pattern[k];
    if (opts.flexible_spaces && p == U' ') {
      if (i >= text.size() || !unicode::is_whitespace(text[i])) return npos;
      while (i < text.size() && unicode::is_whitespace(text[i])) ++i;
      continue;
    }
    if (i >= text.size()) return npos;
    const char32_t c = text[i];
    bool same = c == p;
    if (!same && opts.fold_apostrophes) {
      same = p == U'\'' && is_apostrophe(c);
    }
    if (!same && opts.ascii_case_insensitive) {
      same = ascii_lower(c) == p;
    }
    if (!same && opts.case_insensitive) {
      same = unicode::simple_lower(c) == p;
    }
    if (!same) return npos;
    ++i;
  }
  return i;
}

// Replaces word-bounded occurrences of each `from` with `to`. The table is
// ordered longest key first, so the first hit is the longest match.
Text replace_phrases(const Text& text, const PhraseTable& table,
                     MatchOptions opts) {
  if (table.empty()) return text;
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool replaced = false;
    if (boundary_before(text, i)) {
      for (const auto& phrase : table) {
        const std::size_t end = match_at(text, i, phrase.from, opts);
        if (end != npos && end > i && boundary_after(text, end)) {
          out += phrase.to;
          i = end;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(text[i++]);
  }
  return out;
}

std::size_t skip_spaces(const Text& text, std::size_t i) {
  while (i < text.size() && unicode::is_whitespace(text[i])) ++i;
  return i;
}

// Index of the last non-whitespace character before `pos`, or npos.
std::size_t prev_non_space(const Text& text, std::size_t pos) {
  while (pos > 0) {
    --pos;
    if (!unicode::is_whitespace(text[pos])) return pos;
  }
  return npos;
}

// Renders numerator/denominator rounded to three decimals with trailing
// zeros dropped: 1/2 -> "0.5", 2/3 -> "0.667", 4/2 -> "2".
Text format_ratio(std::uint64_t numerator, std::uint64_t denominator) {
  const std::uint64_t scaled = (numerator * 2000 / denominator + 1) / 2;
  const std::uint64_t whole = scaled / 1000;
  std::uint64_t frac = scaled % 1000;
  std::string s = std::to_string(whole);
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 3 - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    s += '.';
    s += digits;
  }
  return Text(s.begin(), s.end());
}

struct VulgarFraction {
  char32_t code;
  std::uint64_t numerator;
  std::uint64_t denominator;
};

constexpr VulgarFraction kVulgarFractions[] = {
    {0x00BC, 1, 4},  {0x00BD, 1, 2},  {0x00BE, 3, 4},  {0x2150, 1, 7},
    {0x2151, 1, 9},  {0x2152, 1, 10}, {0x2153, 1, 3},  {0x2154, 2, 3},
    {0x2155, 1, 5},  {0x2156, 2, 5},  {0x2157, 3, 5},  {0x2158, 4, 5},
    {0x2159, 1, 6},  {0x215A, 5, 6},  {0x215B, 1, 8},  {0x215C, 3, 8},
    {0x215D, 5, 8},  {0x215E, 7, 8},  {0x2189, 0, 3},
};

const VulgarFraction* find_vulgar(char32_t c) {
  for (const auto& f : kVulgarFractions) {
    if (f.code == c) return &f;
  }
  return nullptr;
}

constexpr char32_t kFractionSlash = 0x2044;
constexpr std::size_t kMaxFractionDigits = 9;

// Parses an ASCII digit run; nullopt when empty or too long.
std::optional<std::uint64_t> parse_digits(const Text& text, std::size_t begin,
                                          std::size_t end) {
  if (begin >= end || end - begin > kMaxFractionDigits) return std::nullopt;
  std::uint64_t v = 0;
  for (std::size_t i = begin; i < end; ++i) v = v * 10 + (text[i] - U'0');
  return v;
}

}  // namespace

Text to_lower(const Text& text) { return unicode::to_lower(text); }

Text clean_contractions(const Text& text, const PhraseTable& contractions) {
  return replace_phrases(text, contractions, {.fold_apostrophes = true});
}

Text remove_control_chars(const Text& text) {
  Text out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (unicode::is_whitespace(c)) {
      out.push_back(U' ');
    } else if (unicode::is_control(c) || unicode::is_default_ignorable(c) ||
               c == 0xFFFD) {
      continue;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

Text symbol_cleanup(const Text& text) {
  Text out;
  out.reserve(text.size());
  for (char32_t c : text) {
    switch (c) {
      case 0x201C: case 0x201D: case 0x201E: case 0x201F:
      case 0x00AB: case 0x00BB: case 0x301D: case 0x301E:
      case 0x301F: case 0xFF02:
        out.push_back(U'"');
        break;
      case 0x2018: case 0x2019: case 0x201A: case 0x201B:
      case 0x2039: case 0x203A: case 0x02BC: case 0xFF07:
        out.push_back(U'\'');
        break;
      case 0x2010: case 0x2011: case 0x2012: case 0x2013:
      case 0x2014: case 0x2015: case 0x2212: case 0x2E3A:
      case 0x2E3B: case 0xFE58: case 0xFE63: case 0xFF0D:
        out.push_back(U'-');
        break;
      case 0x223C: case 0x301C: case 0x2053: case 0xFF5E:
        out.push_back(U'~');
        break;
      case 0x2026:
        out += U"...";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

Text fractions_to_decimals(const Text& text) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = text[i];
    if (const VulgarFraction* f = find_vulgar(c)) {
      // Mixed number: an ASCII digit run already emitted, e.g. "3½".
      std::size_t run = out.size();
      while (run > 0 && is_ascii_digit(out[run - 1])) --run;
      const bool decimal_context = run > 0 && (out[run - 1] == U'.' ||
                                               out[run - 1] == U',');
      const auto whole = decimal_context
                             ? std::nullopt
                             : parse_digits(out, run, out.size());
      if (whole) {
        const std::uint64_t numerator = *whole * f->denominator + f->numerator;
        out.erase(run);
        out += format_ratio(numerator, f->denominator);
      } else {
        out += format_ratio(f->numerator, f->denominator);
      }
      ++i;
      continue;
    }
    if (c == kFractionSlash) {
      std::size_t num_begin = out.size();
      while (num_begin > 0 && is_ascii_digit(out[num_begin - 1])) --num_begin;
      std::size_t den_end = i + 1;
      while (den_end < text.size() && is_ascii_digit(text[den_end])) ++den_end;
      const auto numerator = parse_digits(out, num_begin, out.size());
      const auto denominator = parse_digits(text, i + 1, den_end);
      if (numerator && denominator && *denominator != 0) {
        out.erase(num_begin);
        out += format_ratio(*numerator, *denominator);
        i = den_end;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

Text nfkc(const Text& text) { return unicode::nfkc(text); }

Text range_mul(const Text& text) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = text[i];
    const bool range = c == U'~';
    const bool times = c == U'x' || c == U'X' || c == 0x00D7;
    if (range || times) {
      const std::size_t prev = prev_non_space(text, i);
      const std::size_t next = skip_spaces(text, i + 1);
      const bool between_numbers = prev != npos &&
                                   unicode::is_digit(text[prev]) &&
                                   next < text.size() &&
                                   unicode::is_digit(text[next]);
      // A letter x must stand alone ("10x5", "10 x 5"), not end a word.
      const bool standalone =
          !times || c == 0x00D7 || prev + 1 == i || unicode::is_whitespace(text[i - 1]);
      if (between_numbers && standalone) {
        if (range) {
          while (!out.empty() && unicode::is_whitespace(out.back())) out.pop_back();
          out.push_back(U'-');
          i = next;
        } else {
          out.push_back(U'*');
          ++i;
        }
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

Text percent_temp(const Text& text) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t c = text[i];
    if (c == 0x066A || c == 0xFE6A || c == 0xFF05) c = U'%';

    if (c == U'%' || c == U'°' || c == 0x2103 || c == 0x2109) {
      // Trailing whitespace already emitted after a number is dropped.
      std::size_t back = out.size();
      while (back > 0 && unicode::is_whitespace(out[back - 1])) --back;
      const bool after_number = back > 0 && unicode::is_digit(out[back - 1]);
      if (after_number && c == U'%') {
        out.erase(back);
        out.push_back(U'%');
        ++i;
        continue;
      }
      if (after_number && (c == 0x2103 || c == 0x2109)) {
        if (boundary_after(text, i + 1)) {
          out.erase(back);
          out.push_back(c == 0x2103 ? U'c' : U'f');
          ++i;
          continue;
        }
      }
      if (after_number && c == U'°') {
        const std::size_t scale = skip_spaces(text, i + 1);
        if (scale < text.size()) {
          const char32_t s = ascii_lower(text[scale]);
          if ((s == U'c' || s == U'f') && boundary_after(text, scale + 1)) {
            out.erase(back);
            out.push_back(s);
            i = scale + 1;
            continue;
          }
        }
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

Text model_names(const Text& text, const PhraseTable& aliases) {
  return replace_phrases(text, aliases,
                         {.flexible_spaces = true, .case_insensitive = true});
}

Text number_unit(const Text& text, const std::vector<Text>& units) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = text[i];
    out.push_back(c);
    ++i;
    if (!unicode::is_digit(c)) continue;
    const std::size_t start = skip_spaces(text, i);
    if (start < text.size() && unicode::is_digit(text[start])) continue;
    for (const auto& unit : units) {
      const std::size_t end =
          match_at(text, start, unit, {.ascii_case_insensitive = true});
      if (end != npos && boundary_after(text, end)) {
        out += unit;
        i = end;
        break;
      }
    }
  }
  return out;
}

Text thousand_separators(const Text& text) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!unicode::is_digit(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    // Maximal run of digit groups joined by single commas.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t j = i;
    while (true) {
      const std::size_t g = j;
      while (j < text.size() && unicode::is_digit(text[j])) ++j;
      groups.emplace_back(g, j);
      if (j + 1 < text.size() && text[j] == U',' &&
          unicode::is_digit(text[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    const bool grouped =
        groups.size() > 1 &&
        std::all_of(groups.begin() + 1, groups.end(),
                    [](const auto& g) { return g.second - g.first == 3; });
    if (grouped) {
      for (const auto& [b, e] : groups) out.append(text, b, e - b);
    } else {
      out.append(text, i, j - i);
    }
    i = j;
  }
  return out;
}

Text remove_emoji(const Text& text) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!unicode::is_emoji(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    // Drop the whole cluster: emoji, joiners, selectors and marks.
    while (i < text.size() &&
           (unicode::is_emoji(text[i]) || unicode::is_mark(text[i]) ||
            text[i] == 0x200D)) {
      ++i;
    }
    const bool glue_left = !out.empty() && !unicode::is_whitespace(out.back());
    const bool glue_right = i < text.size() && !unicode::is_whitespace(text[i]);
    if (glue_left && glue_right) out.push_back(U' ');
  }
  return out;
}

Text squeeze_repeats(const Text& text) {
  Text out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = text[i];
    std::size_t j = i + 1;
    if (unicode::is_whitespace(c)) {
      while (j < text.size() && unicode::is_whitespace(text[j])) ++j;
      out.push_back(U' ');
      i = j;
      continue;
    }
    while (j < text.size() && text[j] == c) ++j;
    std::size_t run = j - i;
    if (run >= 3 && unicode::is_alpha(c)) {
      const bool interior = j < text.size() && unicode::is_alpha(text[j]);
      run = interior ? 2 : 1;
    }
    out.append(run, c);
    i = j;
  }
  return out;
}

Text trim_underscores(const Text& text) {
  auto strip = [](char32_t c) {
    return c == U'_' || unicode::is_whitespace(c);
  };
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && strip(text[b])) ++b;
  while (e > b && strip(text[e - 1])) --e;
  return text.substr(b, e - b);
}

Text dedupe_tokens(const Text& text) {
  Text out;
  out.reserve(text.size());
  Text last;
  bool have_last = false;
  std::size_t i = 0;
  while (i < text.size()) {
    i = skip_spaces(text, i);
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !unicode::is_whitespace(text[j])) ++j;
    Text token = text.substr(i, j - i);
    if (!have_last || token != last) {
      if (!out.empty()) out.push_back(U' ');
      out += token;
      last = std::move(token);
      have_last = true;
    }
    i = j;
  }
  return out;
}

Text remove_promo(const Text& text, const std::vector<Text>& phrases) {
  if (phrases.empty()) return text;
  Text current = text;
  // Removal can splice a new occurrence together ("free free shipping
  // shipping"), so repeat until nothing matches. Each round shrinks the text.
  while (true) {
    bool removed = false;
    Text out;
    out.reserve(current.size());
    std::size_t i = 0;
    while (i < current.size()) {
      bool hit = false;
      if (boundary_before(current, i)) {
        for (const auto& phrase : phrases) {
          const std::size_t end =
              match_at(current, i, phrase, {.flexible_spaces = true});
          if (end != npos && boundary_after(current, end)) {
            out.push_back(U' ');
            i = end;
            hit = removed = true;
            break;
          }
        }
      }
      if (!hit) out.push_back(current[i++]);
    }
    current = std::move(out);
    if (!removed) return current;
  }
}

Text tidy_whitespace(const Text& text) {
  Text out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (unicode::is_whitespace(c)) {
      if (!out.empty() && out.back() != U' ') out.push_back(U' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return out;
}

Text apply(RuleId rule, const Text& text, const NormConfig& config) {
  switch (rule) {
    case RuleId::kToLower: return to_lower(text);
    case RuleId::kCleanContractions:
      return clean_contractions(text, config.contraction_table());
    case RuleId::kRemoveControlChars: return remove_control_chars(text);
    case RuleId::kSymbolCleanup: return symbol_cleanup(text);
    case RuleId::kFractionsToDecimals: return fractions_to_decimals(text);
    case RuleId::kNfkc: return nfkc(text);
    case RuleId::kRangeMul: return range_mul(text);
    case RuleId::kPercentTemp: return percent_temp(text);
    case RuleId::kModelNames: return model_names(text, config.alias_table());
    case RuleId::kNumberUnit: return number_unit(text, config.unit_table());
    case RuleId::kThousandSeparators: return thousand_separators(text);
    case RuleId::kRemoveEmoji: return remove_emoji(text);
    case RuleId::kSqueezeRepeats: return squeeze_repeats(text);
    case RuleId::kTrimUnderscores: return trim_underscores(text);
    case RuleId::kDedupeTokens: return dedupe_tokens(text);
    case RuleId::kRemovePromo: return remove_promo(text, config.promo_table());
  }
  throw ValidationError("unknown normalization rule id " +
                        std::to_string(static_cast<int>(rule)));
}

}  // namespace relforge::textnorm::detail
