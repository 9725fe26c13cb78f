#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relforge/error.hpp"

namespace relforge::cli {

// Bad invocation that CLI11 cannot see (e.g. an output path equal to an input).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Global {
  std::uint64_t seed = 42;
  bool strict = true;
};

struct NormalizeArgs {
  std::string input, output, task, norm_config, provider_config;
  bool promo = false;
};

struct InjectArgs {
  std::string input, output;
};

struct TrainArgs {
  std::string input, model, task;
  double epsilon = 0.05;
  double alpha = 0.5;
  double temperature = 2.5;
  double ema_decay = 0.999;
  double dropout = 0.2;
  bool no_t2 = false;
  int epochs = 20;
  double lr = 0.01;
  std::size_t batch_size = 32;
  int hash_bits = 18;
};

struct PredictArgs {
  std::string input, model, output, task;
  bool use_teacher = false;
  bool full_path_keys = false;
  unsigned workers = 1;
};

struct ScoreArgs {
  std::string input, predictions, output, task, calibration;
  std::vector<double> weights;
};

struct CalibrateArgs {
  std::string input, predictions, output, task, mode;
  std::size_t min_leaf_support = 20;
  double grid_lo = 0.30, grid_hi = 0.70, grid_step = 0.02;
  double weight_step = 0.05;
  unsigned workers = 1;
};

struct EvaluateArgs {
  std::string input, predictions, calibration, output, task;
  double threshold = 0.5;
};

void cmd_normalize(const Global& g, const NormalizeArgs& a, std::ostream& out);
void cmd_inject(const Global& g, const InjectArgs& a, std::ostream& out);
void cmd_train(const Global& g, const TrainArgs& a, std::ostream& out);
void cmd_predict(const Global& g, const PredictArgs& a, std::ostream& out);
void cmd_score(const Global& g, const ScoreArgs& a, std::ostream& out);
void cmd_calibrate(const Global& g, const CalibrateArgs& a, std::ostream& out);
void cmd_evaluate(const Global& g, const EvaluateArgs& a, std::ostream& out);

}  // namespace relforge::cli
