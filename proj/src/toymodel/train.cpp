#include <numeric>

#include "relforge/error.hpp"
#include "relforge/toymodel.hpp"

namespace relforge::toymodel {

void TrainOptions::validate() const {
  if (epochs < 0) throw ValidationError("epochs must be non-negative");
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (bits < 1 || bits > 30) throw ValidationError("hash exponent must be in [1, 30]");
}

ModelParams train(const std::vector<Sample>& samples, const SmoothingConfig& smoothing,
                  const DistillConfig& distill, const TrainOptions& options,
                  TrainReport* report) {
  smoothing.validate();
  distill.validate();
  options.validate();
  if (samples.empty()) throw ValidationError("training set is empty");
  for (const auto& s : samples) {
    if (s.label != 0 && s.label != 1) throw ValidationError("training labels must be 0 or 1");
    if (s.x.bits != options.bits) {
      throw ValidationError("feature hash exponent does not match the training options");
    }
  }

  ModelParams params;
  params.bits = options.bits;
  params.rng_seed = options.seed;
  params.student = Weights::zeros(options.bits);
  params.teacher = params.student;
  Weights& student = params.student;
  Weights& teacher = params.teacher;

  Rng rng(options.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);

  // Gradient accumulator and the rows it touched in the current batch. Rows
  // never touched stay equal (zero) in student and teacher, so the EMA only
  // has to visit rows touched at least once.
  std::vector<double> grad(student.w.size(), 0.0);
  std::vector<std::uint32_t> batch_rows;
  std::vector<char> in_batch(student.rows(), 0);
  std::vector<std::uint32_t> live_rows;
  std::vector<char> live(student.rows(), 0);

  if (report != nullptr) *report = {};
  std::vector<DropoutMask> masks;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      const double inv_n = 1.0 / static_cast<double>(end - start);
      Logits grad_b{};
      for (std::size_t p = start; p < end; ++p) {
        const Sample& s = samples[order[p]];
        const DropoutMask mask = sample_dropout(s.x, distill.dropout_rate, rng);
        const Logits zs = forward(student, s.x, &mask);
        const Logits zt = forward(teacher, s.x);
        const Distribution y = smooth_labels(
            s.label == 1 ? Distribution{0.0, 1.0} : Distribution{1.0, 0.0}, smoothing);
        epoch_loss += total_loss(
            ce_loss(zs, y),
            kl_distill_loss(zs, zt, distill.temperature, distill.scale_kl_by_t2),
            distill.alpha);
        const Logits g = logit_gradient(zs, zt, y, distill);
        for (std::size_t e = 0; e < s.x.entries.size(); ++e) {
          if (mask.scale[e] == 0.0) continue;
          const auto& [i, count] = s.x.entries[e];
          const double v = count * mask.scale[e] * inv_n;
          grad[std::size_t{i} * kNumClasses] += v * g[0];
          grad[std::size_t{i} * kNumClasses + 1] += v * g[1];
          if (!in_batch[i]) {
            in_batch[i] = 1;
            batch_rows.push_back(i);
          }
        }
        grad_b[0] += g[0] * inv_n;
        grad_b[1] += g[1] * inv_n;
      }

      for (std::uint32_t i : batch_rows) {
        for (int k = 0; k < kNumClasses; ++k) {
          student.w[std::size_t{i} * kNumClasses + k] -=
              options.lr * grad[std::size_t{i} * kNumClasses + k];
          grad[std::size_t{i} * kNumClasses + k] = 0.0;
        }
        in_batch[i] = 0;
        if (!live[i]) {
          live[i] = 1;
          live_rows.push_back(i);
        }
      }
      batch_rows.clear();
      for (int k = 0; k < kNumClasses; ++k) student.b[k] -= options.lr * grad_b[k];

      if (options.update_teacher) {
        const double d = distill.ema_decay;
        for (std::uint32_t i : live_rows) {
          for (int k = 0; k < kNumClasses; ++k) {
            const std::size_t j = std::size_t{i} * kNumClasses + k;
            teacher.w[j] = d * teacher.w[j] + (1.0 - d) * student.w[j];
          }
        }
        for (int k = 0; k < kNumClasses; ++k) {
          teacher.b[k] = d * teacher.b[k] + (1.0 - d) * student.b[k];
        }
      }
      if (report != nullptr) ++report->steps;
    }
    if (report != nullptr) {
      report->epoch_loss.push_back(epoch_loss / static_cast<double>(samples.size()));
    }
  }
  return params;
}

}  // namespace relforge::toymodel
