#pragma once

// Runs the whole CLI pipeline in-process on synthetic QI pairs.

#include <filesystem>
#include <string>
#include <vector>

#include "support/synth.hpp"

namespace relforge::testing {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args);

void write_synth_records(const std::filesystem::path& path, const std::vector<SynthPair>& pairs);

struct PipelineResult {
  std::vector<std::string> failures;  // "<step>: exit N: stderr"
  double f1 = -1.0;
  std::filesystem::path predictions;
  std::filesystem::path scored;
  std::filesystem::path calibration;
  std::filesystem::path report;
};

// normalize -> train -> predict -> score -> calibrate -> evaluate, all under `dir`.
PipelineResult run_synth_pipeline(const std::filesystem::path& dir,
                                  const std::vector<SynthPair>& train,
                                  const std::vector<SynthPair>& val, std::uint64_t seed = 42);

std::string slurp(const std::filesystem::path& path);

}  // namespace relforge::testing
