#include "relforge/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace relforge::cli {

namespace {

// Routes library warnings to `err` for the duration of one run.
class LogScope {
 public:
  explicit LogScope(std::ostream& err) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("relforge", sink);
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  }
  ~LogScope() { spdlog::set_default_logger(previous_); }

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

void report_error(std::ostream& err, const char* type, const std::string& message,
                  const DataError* data = nullptr) {
  nlohmann::ordered_json j;
  j["error"]["type"] = type;
  if (data) {
    j["error"]["kind"] = to_string(data->kind());
    if (data->line() != 0) j["error"]["line"] = data->line();
  }
  j["error"]["message"] = message;
  err << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

CLI::Option* add_task(CLI::App* sub, std::string& task) {
  return sub->add_option("--task", task, "QC (query-category) or QI (query-item)")
      ->required()
      ->check(CLI::IsMember({"QC", "QI", "qc", "qi"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  LogScope log(err);

  CLI::App app{"Batch pipeline for query-category and query-item relevance"};
  app.name("relforge");
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "TOML/INI file with option defaults ([subcommand] sections)");

  Global g;
  bool strict = false, lenient = false;
  // Every subcommand carries the global flags so its --help lists them.
  auto globals = [&](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    auto* s = sub->add_flag("--strict", strict, "Abort on the first malformed record (default)");
    sub->add_flag("--lenient", lenient, "Skip malformed records and count them")->excludes(s);
    sub->footer("Option defaults may also come from --config FILE (before the subcommand).");
  };

  NormalizeArgs na;
  auto* normalize = app.add_subcommand("normalize", "Normalize query, title and path text");
  globals(normalize);
  normalize->add_option("-i,--input", na.input, "Records file (.jsonl or .tsv)")->required();
  normalize->add_option("-o,--output", na.output, "Output records file")->required();
  add_task(normalize, na.task);
  normalize->add_option("--norm-config", na.norm_config, "Normalizer JSON config");
  normalize->add_option("--provider-config", na.provider_config,
                        "Translate with this provider config before normalizing");
  normalize->add_flag("--promo", na.promo, "Enable promotional-phrase removal");

  InjectArgs ia;
  auto* inject = app.add_subcommand("inject", "Write [Lk]-marked category paths (QC records)");
  globals(inject);
  inject->add_option("-i,--input", ia.input, "QC records file")->required();
  inject->add_option("-o,--output", ia.output, "Output JSONL")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train the hashed linear scorer");
  globals(train);
  train->add_option("-i,--input", ta.input, "Labeled training records")->required();
  train->add_option("-m,--model", ta.model, "Output model file")->required();
  add_task(train, ta.task);
  train->add_option("--epsilon", ta.epsilon, "Label smoothing")->capture_default_str();
  train->add_option("--alpha", ta.alpha, "Distillation weight")->capture_default_str();
  train->add_option("--temperature", ta.temperature, "Distillation temperature")
      ->capture_default_str();
  train->add_option("--ema-decay", ta.ema_decay, "Teacher EMA decay")->capture_default_str();
  train->add_option("--dropout", ta.dropout, "Feature dropout rate")->capture_default_str();
  train->add_flag("--no-t2-scaling", ta.no_t2, "Do not multiply the KL term by T^2");
  train->add_option("--epochs", ta.epochs, "Epochs")->capture_default_str();
  train->add_option("--lr", ta.lr, "SGD learning rate")->capture_default_str();
  train->add_option("--batch-size", ta.batch_size, "Minibatch size")->capture_default_str();
  train->add_option("--hash-bits", ta.hash_bits, "Feature hash exponent")->capture_default_str();

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Score records with a trained model");
  globals(predict);
  predict->add_option("-i,--input", pa.input, "Records file")->required();
  predict->add_option("-m,--model", pa.model, "Model file")->required();
  predict->add_option("-o,--output", pa.output, "Output predictions JSONL")->required();
  add_task(predict, pa.task);
  predict->add_flag("--use-teacher", pa.use_teacher, "Use the EMA teacher weights");
  predict->add_flag("--full-path-keys", pa.full_path_keys,
                    "Key QC predictions by the full path instead of the leaf");
  predict->add_option("--workers", pa.workers, "Threads (output does not depend on it)")
      ->capture_default_str();

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Add jaccard, containment and hybrid score");
  globals(score);
  score->add_option("-i,--input", sa.input, "Records file")->required();
  score->add_option("-p,--predictions", sa.predictions, "Predictions JSONL")->required();
  score->add_option("-o,--output", sa.output, "Output scored predictions JSONL")->required();
  add_task(score, sa.task);
  auto* wopt = score->add_option("--weights", sa.weights, "Hybrid weights w_p w_j w_c")
                   ->expected(3);
  score->add_option("--calibration", sa.calibration, "Take hybrid weights from this table")
      ->excludes(wopt);

  CalibrateArgs ca;
  auto* calib = app.add_subcommand("calibrate", "Tune decision thresholds and hybrid weights");
  globals(calib);
  calib->add_option("-i,--input", ca.input, "Labeled records")->required();
  calib->add_option("-p,--predictions", ca.predictions, "Predictions or scored JSONL")
      ->required();
  calib->add_option("-o,--output", ca.output, "Output calibration table JSON")->required();
  add_task(calib, ca.task);
  calib->add_option("--mode", ca.mode, "leaf | global | hybrid | hybrid-leaf (QC: leaf, QI: hybrid)")
      ->check(CLI::IsMember({"leaf", "global", "hybrid", "hybrid-leaf"}));
  calib->add_option("--min-leaf-support", ca.min_leaf_support, "Samples needed for a leaf threshold")
      ->capture_default_str();
  calib->add_option("--grid-lo", ca.grid_lo, "Lowest threshold")->capture_default_str();
  calib->add_option("--grid-hi", ca.grid_hi, "Highest threshold")->capture_default_str();
  calib->add_option("--grid-step", ca.grid_step, "Threshold step")->capture_default_str();
  calib->add_option("--weight-step", ca.weight_step, "Hybrid weight lattice step")
      ->capture_default_str();
  calib->add_option("--workers", ca.workers, "Threads (output does not depend on it)")
      ->capture_default_str();

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Positive-class F1 report");
  globals(evaluate);
  evaluate->add_option("-i,--input", ea.input, "Labeled records")->required();
  evaluate->add_option("-p,--predictions", ea.predictions, "Predictions or scored JSONL")
      ->required();
  add_task(evaluate, ea.task);
  auto* copt = evaluate->add_option("--calibration", ea.calibration, "Calibration table JSON");
  evaluate->add_option("--threshold", ea.threshold, "Fixed threshold when no table is given")
      ->capture_default_str()
      ->excludes(copt);
  evaluate->add_option("-o,--output", ea.output, "Also write the report here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    report_error(err, "usage", e.what());
    return kExitUsage;
  }

  g.strict = !lenient;
  try {
    if (*normalize) cmd_normalize(g, na, out);
    else if (*inject) cmd_inject(g, ia, out);
    else if (*train) cmd_train(g, ta, out);
    else if (*predict) cmd_predict(g, pa, out);
    else if (*score) cmd_score(g, sa, out);
    else if (*calib) cmd_calibrate(g, ca, out);
    else if (*evaluate) cmd_evaluate(g, ea, out);
    return kExitOk;
  } catch (const UsageError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    report_error(err, "data_error", e.what(), &e);
    return kExitData;
  } catch (const ValidationError& e) {
    report_error(err, "validation_error", e.what());
    return kExitData;
  } catch (const InternalError& e) {
    report_error(err, "internal_error", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what());
    return kExitInternal;
  }
}

}  // namespace relforge::cli
