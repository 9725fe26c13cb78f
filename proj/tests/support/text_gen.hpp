#pragma once

// Seeded generators of messy printable Unicode text for property tests.

#include <cstdint>
#include <random>
#include <string>

namespace relforge::testing {

class TextGenerator {
 public:
  explicit TextGenerator(std::uint64_t seed) : rng_(seed) {}

  // A random printable string of up to `max_len` code points, mixing ASCII,
  // fullwidth forms, emoji, combining marks, compatibility characters and
  // fragments that trigger specific rules.
  std::string next(int max_len = 40);

  // A string made of ASCII words and bare digit runs (no separators).
  std::string next_digit_safe(int max_tokens = 8);

 private:
  char32_t random_code_point();
  std::uint64_t below(std::uint64_t n) { return rng_() % n; }

  std::mt19937_64 rng_;
};

}  // namespace relforge::testing
