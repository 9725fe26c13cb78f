#include "relforge/lexical.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "relforge/error.hpp"
#include "unicode.hpp"

namespace relforge::lexical {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must be in [0, 1], got " +
                          std::to_string(v));
  }
}

}  // namespace

TokenSet::TokenSet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::erase_if(tokens_, [](const std::string& t) { return t.empty(); });
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

bool TokenSet::contains(std::string_view token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

std::vector<std::string> split_tokens(std::string_view text) {
  const std::u32string s = unicode::decode_utf8(text);
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : s) {
    if (unicode::is_whitespace(c)) {
      if (!current.empty()) tokens.push_back(unicode::encode_utf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(unicode::encode_utf8(current));
  return tokens;
}

TokenSet tokenize(std::string_view text) { return TokenSet(split_tokens(text)); }

std::size_t intersection_size(const TokenSet& a, const TokenSet& b) {
  const auto& x = a.tokens();
  const auto& y = b.tokens();
  std::size_t n = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

double jaccard(const TokenSet& q, const TokenSet& t) {
  const std::size_t inter = intersection_size(q, t);
  const std::size_t uni = q.size() + t.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double containment(const TokenSet& q, const TokenSet& t) {
  if (q.empty()) {
    spdlog::warn("containment: empty query token set, scoring as 0");
    return 0.0;
  }
  return static_cast<double>(intersection_size(q, t)) /
         static_cast<double>(q.size());
}

HybridWeights HybridWeights::normalized(double w_p, double w_j, double w_c) {
  for (double w : {w_p, w_j, w_c}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("hybrid weights must be finite and non-negative");
    }
  }
  const double sum = w_p + w_j + w_c;
  if (sum <= 0.0) throw ValidationError("hybrid weights must not all be zero");
  if (std::abs(sum - 1.0) <= 1e-12) return {w_p, w_j, w_c};
  return {w_p / sum, w_j / sum, w_c / sum};
}

void HybridWeights::validate() const {
  for (double w : {w_p, w_j, w_c}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("hybrid weights must be finite and non-negative");
    }
  }
  if (std::abs(w_p + w_j + w_c - 1.0) > kSumTolerance) {
    throw ValidationError("hybrid weights must sum to 1");
  }
}

double hybrid_score(double p_model, double j, double c, const HybridWeights& w) {
  check_unit(p_model, "p_model");
  check_unit(j, "jaccard");
  check_unit(c, "containment");
  w.validate();
  const double s = w.w_p * p_model + w.w_j * j + w.w_c * c;
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace relforge::lexical
