#pragma once

// Linear two-class relevance scorer over hashed text features, trained with
// label-smoothed cross-entropy plus distillation from an EMA teacher.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relforge/rng.hpp"

namespace relforge::toymodel {

inline constexpr int kNumClasses = 2;
inline constexpr int kDefaultHashBits = 18;
inline constexpr std::string_view kModelMagic = "RFORGE-TOY-1";

using Distribution = std::array<double, kNumClasses>;
using Logits = std::array<double, kNumClasses>;

struct SmoothingConfig {
  double epsilon = 0.05;
  int num_classes = kNumClasses;

  void validate() const;
};

struct DistillConfig {
  double alpha = 0.5;
  double temperature = 2.5;
  double ema_decay = 0.999;
  double dropout_rate = 0.20;
  // Multiply the KL term by T^2.
  bool scale_kl_by_t2 = true;

  void validate() const;
};

// Sorted by index, one entry per distinct index.
struct FeatureVector {
  struct Entry {
    std::uint32_t index;
    std::uint32_t count;
    bool operator==(const Entry&) const = default;
  };
  int bits = kDefaultHashBits;
  std::vector<Entry> entries;

  bool empty() const noexcept { return entries.empty(); }
  bool operator==(const FeatureVector&) const = default;
};

// Stable 64-bit string hash (FNV-1a with a final avalanche mix).
std::uint64_t hash64(std::string_view key);

enum class FeatureKind { kUnigram, kTrigram, kOverlap };

struct FeatureKey {
  FeatureKind kind;
  std::string key;
};

// Unhashed feature keys: field-tagged word unigrams, field-tagged character
// trigrams of each padded word, and one hit/miss feature per distinct query
// token according to whether it also occurs in the target (spread over a
// few shards keyed by the token).
std::vector<FeatureKey> feature_keys(std::string_view query, std::string_view target);

FeatureVector featurize(std::string_view query, std::string_view target,
                        int bits = kDefaultHashBits);

// Dense (2^bits x K) row-major weights plus K biases.
struct Weights {
  int bits = kDefaultHashBits;
  std::vector<double> w;
  Logits b{};

  static Weights zeros(int bits);
  std::size_t rows() const noexcept { return w.size() / kNumClasses; }
  bool operator==(const Weights&) const = default;
};

struct ModelParams {
  Weights student;
  Weights teacher;
  std::uint64_t rng_seed = 42;
  int bits = kDefaultHashBits;

  bool operator==(const ModelParams&) const = default;
};

// Per-entry multipliers for inverted dropout: 0 or 1 / (1 - rate).
struct DropoutMask {
  std::vector<double> scale;
};

DropoutMask sample_dropout(const FeatureVector& x, double rate, Rng& rng);

struct Dropout {
  double rate;
  Rng* rng;
};

Distribution smooth_labels(const Distribution& y, const SmoothingConfig& cfg);

Distribution softmax(const Logits& z, double temperature = 1.0);

Logits forward(const Weights& w, const FeatureVector& x,
               const DropoutMask* mask = nullptr);
// Dropout applies to the student only; passing it with use_teacher throws.
Logits forward(const ModelParams& params, const FeatureVector& x, bool use_teacher,
               std::optional<Dropout> dropout = std::nullopt);

double ce_loss(const Logits& student, const Distribution& target);
double kl_distill_loss(const Logits& student, const Logits& teacher, double temperature,
                       bool scale_by_t2 = true);
double total_loss(double ce, double kl, double alpha);

// d total_loss / d student logits for one sample; the teacher is a constant.
Logits logit_gradient(const Logits& student, const Logits& teacher,
                      const Distribution& target, const DistillConfig& distill);

// Elementwise decay * teacher + (1 - decay) * student.
Weights ema_update(const Weights& teacher, const Weights& student, double decay);

struct Sample {
  FeatureVector x;
  int label = 0;
};

// Mean total loss over `batch`, and optionally its gradient with respect to
// the student weights. `masks`, when given, is parallel to `batch`.
double batch_loss(const Weights& student, const Weights& teacher,
                  const std::vector<Sample>& batch,
                  const std::vector<DropoutMask>* masks,
                  const SmoothingConfig& smoothing, const DistillConfig& distill,
                  Weights* gradient = nullptr);

struct TrainOptions {
  int epochs = 20;
  double lr = 0.01;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  int bits = kDefaultHashBits;
  // Off only for tests that need the teacher frozen.
  bool update_teacher = true;

  void validate() const;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::size_t steps = 0;
};

ModelParams train(const std::vector<Sample>& samples, const SmoothingConfig& smoothing,
                  const DistillConfig& distill, const TrainOptions& options,
                  TrainReport* report = nullptr);

// Positive-class probability per sample. Shards run on `workers` threads.
std::vector<double> predict(const ModelParams& params,
                            const std::vector<FeatureVector>& xs, bool use_teacher,
                            unsigned workers = 1);

void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace relforge::toymodel
