#pragma once

// Synthetic query/title pairs whose clean label is containment >= 2/3.

#include <cstdint>
#include <string>
#include <vector>

namespace relforge::testing {

struct SynthPair {
  std::string id;
  std::string language;
  std::string query;  // possibly with surface noise
  std::string title;
  std::string clean_query;
  std::string clean_title;
  int clean_label = 0;
  int label = 0;  // clean_label with `label_noise` flips
  double containment = 0.0;
};

struct SynthOptions {
  double label_noise = 0.0;
  // Uppercase, fullwidth letters, emoji, zero-width spaces and doubled
  // spaces; all undone by the default normalization pipeline.
  bool surface_noise = false;
  std::string id_prefix = "s";
};

std::vector<SynthPair> synth_pairs(std::size_t n, std::uint64_t seed,
                                   const SynthOptions& options = {});

// Lowercase syllable word; a fixed point of normalization.
std::string synth_word(std::size_t i);

}  // namespace relforge::testing
