#pragma once

// Token-set overlap features and the weighted hybrid relevance score.

#include <string>
#include <string_view>
#include <vector>

namespace relforge::lexical {

// Sorted, duplicate-free set of non-empty whitespace-free tokens.
class TokenSet {
 public:
  TokenSet() = default;
  explicit TokenSet(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  bool contains(std::string_view token) const;

  bool operator==(const TokenSet&) const = default;

 private:
  std::vector<std::string> tokens_;
};

// Whitespace-separated tokens in order, duplicates kept.
std::vector<std::string> split_tokens(std::string_view text);

// Splits on Unicode whitespace.
TokenSet tokenize(std::string_view text);

std::size_t intersection_size(const TokenSet& a, const TokenSet& b);

// |q ∩ t| / |q ∪ t|, 0 when both are empty.
double jaccard(const TokenSet& q, const TokenSet& t);

// |q ∩ t| / |q|, 0 (with a warning) when q is empty.
double containment(const TokenSet& q, const TokenSet& t);

struct HybridWeights {
  double w_p = 1.0;
  double w_j = 0.0;
  double w_c = 0.0;

  // Rescales non-negative weights onto the simplex. Throws ValidationError on
  // negative, non-finite or all-zero input.
  static HybridWeights normalized(double w_p, double w_j, double w_c);

  // Throws ValidationError unless each weight is >= 0 and they sum to 1.
  void validate() const;

  bool operator==(const HybridWeights&) const = default;
};

// w_p * p_model + w_j * j + w_c * c. Throws ValidationError when an input is
// outside [0, 1] or the weights are invalid.
double hybrid_score(double p_model, double j, double c, const HybridWeights& w);

}  // namespace relforge::lexical
