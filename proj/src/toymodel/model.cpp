#include <algorithm>
#include <cmath>
#include <thread>

#include "relforge/error.hpp"
#include "relforge/lexical.hpp"
#include "relforge/toymodel.hpp"
#include "unicode.hpp"

namespace relforge::toymodel {

namespace {

void check_bits(int bits) {
  if (bits < 1 || bits > 30) {
    throw ValidationError("hash exponent must be in [1, 30], got " + std::to_string(bits));
  }
}

double log_sum_exp(const Logits& z) {
  const double m = std::max(z[0], z[1]);
  return m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
}

Logits scaled(const Logits& z, double t) { return {z[0] / t, z[1] / t}; }

// Field tags keep query and target features in separate hash buckets.
constexpr std::string_view kQueryWord = "q\x1fw:";
constexpr std::string_view kTargetWord = "t\x1fw:";
constexpr std::string_view kQueryTri = "q\x1f" "c:";
constexpr std::string_view kTargetTri = "t\x1f" "c:";
constexpr std::string_view kHit = "x\x1fhit";
constexpr std::string_view kMiss = "x\x1fmiss";
// Overlap counts are spread over a few shards keyed by the token, so a
// dropped feature removes part of the evidence instead of all of it.
constexpr std::uint64_t kOverlapShards = 4;

std::vector<std::string> trigrams(const std::string& tok) {
  std::vector<std::string> out;
  const std::u32string padded = U"<" + unicode::decode_utf8(tok) + U">";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    out.push_back(unicode::encode_utf8(padded.substr(i, 3)));
  }
  return out;
}

void add_field(std::vector<FeatureKey>& out, const std::vector<std::string>& tokens,
               std::string_view word_tag, std::string_view tri_tag) {
  for (const auto& tok : tokens) {
    out.push_back({FeatureKind::kUnigram, std::string(word_tag) + tok});
  }
  for (const auto& tok : tokens) {
    for (auto& tri : trigrams(tok)) {
      out.push_back({FeatureKind::kTrigram, std::string(tri_tag) + tri});
    }
  }
}

}  // namespace

void SmoothingConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("label smoothing epsilon must be in [0, 1]");
  }
  if (num_classes != kNumClasses) {
    throw ValidationError("only two classes are supported");
  }
}

void DistillConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in [0, 1]");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be positive");
  }
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) {
    throw ValidationError("EMA decay must be in [0, 1)");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ValidationError("dropout rate must be in [0, 1)");
  }
}

std::uint64_t hash64(std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer; FNV alone leaves the low bits weak.
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::vector<FeatureKey> feature_keys(std::string_view query, std::string_view target) {
  const auto q = lexical::split_tokens(query);
  const auto t = lexical::split_tokens(target);
  std::vector<FeatureKey> out;
  add_field(out, q, kQueryWord, kQueryTri);
  add_field(out, t, kTargetWord, kTargetTri);
  const lexical::TokenSet qs(q);
  const lexical::TokenSet ts(t);
  for (const auto& tok : qs.tokens()) {
    std::string key(ts.contains(tok) ? kHit : kMiss);
    key += static_cast<char>('0' + hash64(tok) % kOverlapShards);
    out.push_back({FeatureKind::kOverlap, std::move(key)});
  }
  return out;
}

FeatureVector featurize(std::string_view query, std::string_view target, int bits) {
  check_bits(bits);
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  std::vector<std::uint32_t> idx;
  for (const auto& k : feature_keys(query, target)) {
    idx.push_back(static_cast<std::uint32_t>(hash64(k.key) & mask));
  }
  std::sort(idx.begin(), idx.end());
  FeatureVector x;
  x.bits = bits;
  for (std::uint32_t i : idx) {
    if (!x.entries.empty() && x.entries.back().index == i) {
      ++x.entries.back().count;
    } else {
      x.entries.push_back({i, 1});
    }
  }
  return x;
}

Weights Weights::zeros(int bits) {
  check_bits(bits);
  Weights w;
  w.bits = bits;
  w.w.assign((std::size_t{1} << bits) * kNumClasses, 0.0);
  return w;
}

DropoutMask sample_dropout(const FeatureVector& x, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ValidationError("dropout rate must be in [0, 1)");
  DropoutMask m;
  m.scale.resize(x.entries.size());
  const double keep = 1.0 / (1.0 - rate);
  for (auto& s : m.scale) s = rng.uniform() < rate ? 0.0 : keep;
  return m;
}

Distribution smooth_labels(const Distribution& y, const SmoothingConfig& cfg) {
  cfg.validate();
  const bool one_hot = (y[0] == 1.0 && y[1] == 0.0) || (y[0] == 0.0 && y[1] == 1.0);
  if (!one_hot) throw ValidationError("smooth_labels expects a one-hot target");
  const double k = static_cast<double>(cfg.num_classes);
  return {(1.0 - cfg.epsilon) * y[0] + cfg.epsilon / k,
          (1.0 - cfg.epsilon) * y[1] + cfg.epsilon / k};
}

Distribution softmax(const Logits& z, double temperature) {
  const Logits s = scaled(z, temperature);
  const double m = std::max(s[0], s[1]);
  const double e0 = std::exp(s[0] - m);
  const double e1 = std::exp(s[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

Logits forward(const Weights& w, const FeatureVector& x, const DropoutMask* mask) {
  if (x.bits != w.bits) {
    throw InternalError("feature hash exponent " + std::to_string(x.bits) +
                        " does not match model exponent " + std::to_string(w.bits));
  }
  if (mask != nullptr && mask->scale.size() != x.entries.size()) {
    throw InternalError("dropout mask size mismatch");
  }
  const std::size_t rows = w.rows();
  Logits z = w.b;
  for (std::size_t e = 0; e < x.entries.size(); ++e) {
    const auto& [i, count] = x.entries[e];
    if (i >= rows) throw InternalError("feature index out of range");
    double v = count;
    if (mask != nullptr) {
      if (mask->scale[e] == 0.0) continue;
      v *= mask->scale[e];
    }
    z[0] += v * w.w[std::size_t{i} * kNumClasses];
    z[1] += v * w.w[std::size_t{i} * kNumClasses + 1];
  }
  return z;
}

Logits forward(const ModelParams& params, const FeatureVector& x, bool use_teacher,
               std::optional<Dropout> dropout) {
  if (!dropout) return forward(use_teacher ? params.teacher : params.student, x);
  if (use_teacher) throw ValidationError("dropout applies to the student only");
  const DropoutMask m = sample_dropout(x, dropout->rate, *dropout->rng);
  return forward(params.student, x, &m);
}

double ce_loss(const Logits& student, const Distribution& target) {
  const double lse = log_sum_exp(student);
  double loss = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    if (target[k] != 0.0) loss -= target[k] * (student[k] - lse);
  }
  return std::max(loss, 0.0);
}

double kl_distill_loss(const Logits& student, const Logits& teacher, double temperature,
                       bool scale_by_t2) {
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
  const Logits s = scaled(student, temperature);
  const Logits t = scaled(teacher, temperature);
  const double lse_s = log_sum_exp(s);
  const double lse_t = log_sum_exp(t);
  double kl = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    const double log_p = t[k] - lse_t;
    const double p = std::exp(log_p);
    if (p != 0.0) kl += p * (log_p - (s[k] - lse_s));
  }
  kl = std::max(kl, 0.0);
  return scale_by_t2 ? temperature * temperature * kl : kl;
}

double total_loss(double ce, double kl, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in [0, 1]");
  return alpha * ce + (1.0 - alpha) * kl;
}

Logits logit_gradient(const Logits& student, const Logits& teacher,
                      const Distribution& target, const DistillConfig& distill) {
  const double t = distill.temperature;
  const Distribution q = softmax(student);
  const Distribution qs = softmax(student, t);
  const Distribution pt = softmax(teacher, t);
  const double kl_scale = distill.scale_kl_by_t2 ? t : 1.0 / t;
  Logits g;
  for (int k = 0; k < kNumClasses; ++k) {
    g[k] = distill.alpha * (q[k] - target[k]) +
           (1.0 - distill.alpha) * kl_scale * (qs[k] - pt[k]);
  }
  return g;
}

Weights ema_update(const Weights& teacher, const Weights& student, double decay) {
  if (teacher.bits != student.bits || teacher.w.size() != student.w.size()) {
    throw InternalError("EMA update on weights of different shapes");
  }
  if (!(decay >= 0.0 && decay < 1.0)) throw ValidationError("EMA decay must be in [0, 1)");
  Weights out = teacher;
  for (std::size_t i = 0; i < out.w.size(); ++i) {
    out.w[i] = decay * teacher.w[i] + (1.0 - decay) * student.w[i];
  }
  for (int k = 0; k < kNumClasses; ++k) {
    out.b[k] = decay * teacher.b[k] + (1.0 - decay) * student.b[k];
  }
  return out;
}

double batch_loss(const Weights& student, const Weights& teacher,
                  const std::vector<Sample>& batch, const std::vector<DropoutMask>* masks,
                  const SmoothingConfig& smoothing, const DistillConfig& distill,
                  Weights* gradient) {
  if (batch.empty()) throw ValidationError("empty batch");
  if (masks != nullptr && masks->size() != batch.size()) {
    throw InternalError("dropout mask count mismatch");
  }
  if (gradient != nullptr) *gradient = Weights::zeros(student.bits);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const Sample& sample = batch[s];
    const DropoutMask* mask = masks != nullptr ? &(*masks)[s] : nullptr;
    const Logits zs = forward(student, sample.x, mask);
    const Logits zt = forward(teacher, sample.x);
    const Distribution y = smooth_labels(
        sample.label == 1 ? Distribution{0.0, 1.0} : Distribution{1.0, 0.0}, smoothing);
    loss += total_loss(ce_loss(zs, y),
                       kl_distill_loss(zs, zt, distill.temperature, distill.scale_kl_by_t2),
                       distill.alpha);
    if (gradient == nullptr) continue;
    const Logits g = logit_gradient(zs, zt, y, distill);
    for (std::size_t e = 0; e < sample.x.entries.size(); ++e) {
      const auto& [i, count] = sample.x.entries[e];
      const double v = count * (mask != nullptr ? mask->scale[e] : 1.0) * inv_n;
      gradient->w[std::size_t{i} * kNumClasses] += v * g[0];
      gradient->w[std::size_t{i} * kNumClasses + 1] += v * g[1];
    }
    gradient->b[0] += g[0] * inv_n;
    gradient->b[1] += g[1] * inv_n;
  }
  return loss * inv_n;
}

std::vector<double> predict(const ModelParams& params, const std::vector<FeatureVector>& xs,
                            bool use_teacher, unsigned workers) {
  std::vector<double> out(xs.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = softmax(forward(params, xs[i], use_teacher))[1];
    }
  };
  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, xs.size() / 256));
  if (n_workers == 1) {
    run(0, xs.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (xs.size() + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t begin = std::min(xs.size(), w * chunk);
    pool.emplace_back(run, begin, std::min(xs.size(), begin + chunk));
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace relforge::toymodel
