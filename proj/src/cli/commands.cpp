#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "relforge/calibrate.hpp"
#include "relforge/dataio.hpp"
#include "relforge/lexical.hpp"
#include "relforge/metrics.hpp"
#include "relforge/pathcat.hpp"
#include "relforge/textnorm.hpp"
#include "relforge/toymodel.hpp"

namespace relforge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using dataio::Prediction;
using dataio::Record;
using dataio::Task;

namespace {

std::string dump(const ordered_json& j, int indent = -1) {
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

// Refuses to write over any of `inputs`.
void guard(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  for (const auto& o : outputs) {
    if (o.empty()) continue;
    std::error_code ec;
    for (const auto& i : inputs) {
      if (i.empty()) continue;
      if (fs::weakly_canonical(o, ec) == fs::weakly_canonical(i, ec) ||
          fs::equivalent(o, i, ec)) {
        throw UsageError("output '" + o + "' would overwrite input '" + i + "'");
      }
    }
  }
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw DataError(DataErrorKind::kIo, std::string(what) + " '" + path + "' does not exist");
  }
}

std::vector<Record> load(const Global& g, const std::string& path, Task task,
                         dataio::ReadReport* report = nullptr) {
  require_file(path, "input");
  dataio::ReadReport rep;
  auto rs = dataio::read_records(path, dataio::format_for_path(path), task, {.strict = g.strict}, &rep);
  if (rep.skipped > 0) {
    spdlog::warn("{}: skipped {} malformed line(s)", path, rep.skipped);
    for (const auto& m : rep.messages) spdlog::warn("  {}", m);
  }
  if (report) *report = rep;
  return rs;
}

ordered_json read_report_json(const dataio::ReadReport& r) {
  ordered_json j;
  j["lines"] = r.lines;
  j["records"] = r.records;
  j["skipped"] = r.skipped;
  j["errors_by_kind"] = r.errors_by_kind;
  return j;
}

ordered_json meta_base(const Global& g, const char* command, std::optional<Task> task) {
  ordered_json m;
  m["command"] = command;
  m["seed"] = g.seed;
  if (task) m["task"] = dataio::to_string(*task);
  m["strict"] = g.strict;
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(DataErrorKind::kIo, "cannot write " + path.string());
  f << text;
  f.flush();
  if (!f) throw DataError(DataErrorKind::kIo, "failed writing " + path.string());
}

void write_meta(const std::string& output, const ordered_json& meta) {
  write_text(output + ".meta.json", dump(meta, 2) + "\n");
}

int label_of(const Record& r) {
  if (!r.label) throw ValidationError("record '" + r.id + "' has no label");
  return *r.label;
}

// Text the model sees on the target side.
std::string model_target(const Record& r) {
  if (r.task == Task::kQC) return pathcat::inject_levels(pathcat::parse_path(*r.cate_path));
  return r.target_text();
}

// Text the lexical features see on the target side.
std::string lexical_target(const Record& r) {
  if (r.task == Task::kQC) {
    const auto p = pathcat::parse_path(*r.cate_path);
    std::string s;
    for (const auto& l : p.levels) s += (s.empty() ? "" : " ") + l;
    return s;
  }
  return r.target_text();
}

std::pair<double, double> lexical_pair(const Record& r) {
  const auto q = lexical::tokenize(r.query_text());
  const auto t = lexical::tokenize(lexical_target(r));
  return {lexical::jaccard(q, t), lexical::containment(q, t)};
}

toymodel::FeatureVector features(const Record& r, int bits) {
  return toymodel::featurize(r.query_text(), model_target(r), bits);
}

calibrate::CalibrationTable load_table(const std::string& path) {
  require_file(path, "calibration table");
  std::ifstream in(path, std::ios::binary);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(DataErrorKind::kParse, path + ": " + e.what());
  }
  return calibrate::CalibrationTable::from_json(j);
}

// Predictions paired 1:1 with records by id, in record order.
struct Joined {
  const Record* record;
  const Prediction* pred;
};

std::vector<Joined> join(const std::vector<Record>& rs, const std::vector<Prediction>& ps) {
  std::map<std::string_view, const Prediction*> by_id;
  for (const auto& p : ps) {
    if (!by_id.emplace(p.id, &p).second) {
      throw DataError(DataErrorKind::kDuplicateId, "duplicate prediction id '" + p.id + "'");
    }
  }
  std::vector<Joined> out;
  for (const auto& r : rs) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      throw DataError(DataErrorKind::kMissingField, "no prediction for record '" + r.id + "'");
    }
    out.push_back({&r, it->second});
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw DataError(DataErrorKind::kMissingField,
                    "prediction '" + std::string(by_id.begin()->first) + "' has no record");
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::string& path) {
  require_file(path, "predictions");
  return dataio::read_predictions(path);
}

std::pair<double, double> lexical_of(const Joined& j) {
  if (j.pred->jaccard && j.pred->containment) return {*j.pred->jaccard, *j.pred->containment};
  return lexical_pair(*j.record);
}

std::string normalize_path(const std::string& raw, const textnorm::NormConfig& cfg,
                           textnorm::NormStats& stats) {
  const auto p = pathcat::parse_path(raw);
  pathcat::CategoryPath out;
  for (const auto& l : p.levels) {
    auto n = textnorm::normalize(l, cfg, &stats);
    if (!n.empty()) out.levels.push_back(std::move(n));
  }
  if (out.levels.empty()) return raw;
  return pathcat::join_path(out);
}

}  // namespace

void cmd_normalize(const Global& g, const NormalizeArgs& a, std::ostream& out) {
  const Task task = dataio::task_from_string(a.task);
  guard({a.input, a.norm_config, a.provider_config}, {a.output});
  dataio::ReadReport rep;
  auto rs = load(g, a.input, task, &rep);

  textnorm::NormConfig cfg;
  if (!a.norm_config.empty()) {
    require_file(a.norm_config, "norm config");
    cfg = textnorm::NormConfig::load(a.norm_config);
  }
  if (a.promo) {
    auto s = cfg.settings();
    s.promo_enabled = true;
    cfg = textnorm::NormConfig(std::move(s));
  }

  ordered_json meta = meta_base(g, "normalize", task);
  if (!a.provider_config.empty()) {
    require_file(a.provider_config, "provider config");
    const auto pc = dataio::ProviderConfig::load(a.provider_config);
    auto provider = pc.make(fs::path(a.provider_config).parent_path());
    const auto tr = dataio::translate(rs, *provider, pc.batch_size);
    if (tr.untranslated > 0) spdlog::warn("{} string(s) left untranslated", tr.untranslated);
    meta["translation"] = tr.to_json();
  }

  textnorm::NormStats stats;
  auto norm = [&](std::optional<std::string>& s) {
    if (s) s = textnorm::normalize(*s, cfg, &stats);
  };
  for (auto& r : rs) {
    r.origin_query = textnorm::normalize(r.origin_query, cfg, &stats);
    norm(r.query_en);
    norm(r.item_title);
    norm(r.title_en);
    if (r.cate_path) r.cate_path = normalize_path(*r.cate_path, cfg, stats);
  }
  dataio::write_records(a.output, rs, dataio::format_for_path(a.output));

  ordered_json report;
  report["records"] = rs.size();
  report["read"] = read_report_json(rep);
  report["rule_changes"] = stats.to_json();
  if (meta.contains("translation")) report["translation"] = meta["translation"];
  meta["promo_enabled"] = cfg.settings().promo_enabled;
  meta["report"] = report;
  write_meta(a.output, meta);
  out << dump(report, 2) << '\n';
}

void cmd_inject(const Global& g, const InjectArgs& a, std::ostream& out) {
  guard({a.input}, {a.output});
  const auto rs = load(g, a.input, Task::kQC);
  std::string text;
  for (const auto& r : rs) {
    const auto p = pathcat::parse_path(*r.cate_path);
    ordered_json j;
    j["id"] = r.id;
    j["cate_path"] = *r.cate_path;
    j["injected"] = pathcat::inject_levels(p);
    j["leaf"] = pathcat::leaf_of(p);
    j["depth"] = p.depth();
    text += dump(j) + "\n";
  }
  write_text(a.output, text);
  out << dump(ordered_json{{"records", rs.size()}}) << '\n';
}

void cmd_train(const Global& g, const TrainArgs& a, std::ostream& out) {
  const Task task = dataio::task_from_string(a.task);
  guard({a.input}, {a.model});
  const auto rs = load(g, a.input, task);
  if (rs.empty()) throw ValidationError("no training records in " + a.input);

  toymodel::SmoothingConfig sm;
  sm.epsilon = a.epsilon;
  toymodel::DistillConfig dc;
  dc.alpha = a.alpha;
  dc.temperature = a.temperature;
  dc.ema_decay = a.ema_decay;
  dc.dropout_rate = a.dropout;
  dc.scale_kl_by_t2 = !a.no_t2;
  toymodel::TrainOptions opt;
  opt.epochs = a.epochs;
  opt.lr = a.lr;
  opt.batch_size = a.batch_size;
  opt.seed = g.seed;
  opt.bits = a.hash_bits;
  sm.validate();
  dc.validate();
  opt.validate();

  std::vector<toymodel::Sample> samples;
  samples.reserve(rs.size());
  for (const auto& r : rs) samples.push_back({features(r, a.hash_bits), label_of(r)});

  toymodel::TrainReport tr;
  const auto params = toymodel::train(samples, sm, dc, opt, &tr);
  toymodel::save_model(params, a.model);

  ordered_json report;
  report["records"] = rs.size();
  report["steps"] = tr.steps;
  report["epoch_loss"] = tr.epoch_loss;
  ordered_json meta = meta_base(g, "train", task);
  meta["hyperparameters"] = {{"epsilon", a.epsilon},     {"alpha", a.alpha},
                             {"temperature", a.temperature}, {"ema_decay", a.ema_decay},
                             {"dropout", a.dropout},     {"t2_scaling", !a.no_t2},
                             {"epochs", a.epochs},       {"lr", a.lr},
                             {"batch_size", a.batch_size}, {"hash_bits", a.hash_bits}};
  meta["report"] = report;
  write_meta(a.model, meta);
  out << dump(report, 2) << '\n';
}

void cmd_predict(const Global& g, const PredictArgs& a, std::ostream& out) {
  const Task task = dataio::task_from_string(a.task);
  guard({a.input, a.model}, {a.output});
  const auto rs = load(g, a.input, task);
  require_file(a.model, "model");
  const auto params = toymodel::load_model(a.model);

  std::vector<toymodel::FeatureVector> xs;
  xs.reserve(rs.size());
  for (const auto& r : rs) xs.push_back(features(r, params.bits));
  const auto probs = toymodel::predict(params, xs, a.use_teacher, std::max(1u, a.workers));

  std::vector<Prediction> ps;
  ps.reserve(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    Prediction p;
    p.id = rs[i].id;
    p.prob = probs[i];
    if (task == Task::kQC) {
      const auto path = pathcat::parse_path(*rs[i].cate_path);
      p.leaf = a.full_path_keys ? pathcat::join_path(path) : pathcat::leaf_of(path);
    }
    ps.push_back(std::move(p));
  }
  dataio::write_predictions(ps, a.output);

  ordered_json meta = meta_base(g, "predict", task);
  meta["weights"] = a.use_teacher ? "teacher" : "student";
  meta["leaf_keys"] = a.full_path_keys ? "full_path" : "leaf";
  meta["model_seed"] = params.rng_seed;
  meta["predictions"] = ps.size();
  write_meta(a.output, meta);
  out << dump(ordered_json{{"predictions", ps.size()}}) << '\n';
}

void cmd_score(const Global& g, const ScoreArgs& a, std::ostream& out) {
  const Task task = dataio::task_from_string(a.task);
  guard({a.input, a.predictions, a.calibration}, {a.output});
  lexical::HybridWeights w;
  if (!a.calibration.empty()) {
    w = load_table(a.calibration).hybrid_weights;
  } else if (!a.weights.empty()) {
    w = {a.weights.at(0), a.weights.at(1), a.weights.at(2)};
    w.validate();
  }
  const auto rs = load(g, a.input, task);
  const auto ps = load_predictions(a.predictions);
  std::vector<Prediction> scored;
  for (const auto& j : join(rs, ps)) {
    Prediction p = *j.pred;
    const auto [jac, con] = lexical_pair(*j.record);
    p.jaccard = jac;
    p.containment = con;
    p.score = lexical::hybrid_score(p.prob, jac, con, w);
    scored.push_back(std::move(p));
  }
  dataio::write_predictions(scored, a.output);

  ordered_json meta = meta_base(g, "score", task);
  meta["hybrid_weights"] = {{"w_p", w.w_p}, {"w_j", w.w_j}, {"w_c", w.w_c}};
  meta["predictions"] = scored.size();
  write_meta(a.output, meta);
  out << dump(ordered_json{{"scored", scored.size()}}) << '\n';
}

void cmd_calibrate(const Global& g, const CalibrateArgs& a, std::ostream& out) {
  const Task task = dataio::task_from_string(a.task);
  guard({a.input, a.predictions}, {a.output});
  const std::string mode = a.mode.empty() ? (task == Task::kQC ? "leaf" : "hybrid") : a.mode;
  calibrate::ThresholdGrid grid{a.grid_lo, a.grid_hi, a.grid_step};
  grid.validate();

  const auto rs = load(g, a.input, task);
  const auto ps = load_predictions(a.predictions);
  const auto joined = join(rs, ps);
  if (joined.empty()) throw ValidationError("calibration needs at least one labeled record");

  auto leaf_samples = [&](const std::vector<double>& scores) {
    std::vector<calibrate::LeafSample> out;
    for (std::size_t i = 0; i < joined.size(); ++i) {
      const auto& p = *joined[i].pred;
      if (!p.leaf) throw ValidationError("prediction '" + p.id + "' has no leaf key");
      out.push_back({scores[i], label_of(*joined[i].record), *p.leaf});
    }
    return out;
  };
  std::vector<double> probs;
  std::vector<int> labels;
  for (const auto& j : joined) {
    probs.push_back(j.pred->prob);
    labels.push_back(label_of(*j.record));
  }

  calibrate::CalibrationTable table;
  table.grid = grid;
  table.min_leaf_support = a.min_leaf_support;
  std::optional<double> hybrid_f1;
  if (mode == "global") {
    table.global_threshold = calibrate::tune_global_threshold(probs, labels, grid);
  } else if (mode == "leaf") {
    table = calibrate::tune_leaf_thresholds(leaf_samples(probs), grid, a.min_leaf_support,
                                            std::max(1u, a.workers));
  } else if (mode == "hybrid" || mode == "hybrid-leaf") {
    std::vector<calibrate::HybridSample> hs;
    for (std::size_t i = 0; i < joined.size(); ++i) {
      const auto [jac, con] = lexical_of(joined[i]);
      hs.push_back({probs[i], jac, con, labels[i]});
    }
    const auto res = calibrate::tune_hybrid_weights(hs, grid, a.weight_step);
    hybrid_f1 = res.f1;
    if (mode == "hybrid") {
      table.global_threshold = res.threshold;
    } else {
      std::vector<double> scores;
      for (const auto& h : hs) {
        scores.push_back(lexical::hybrid_score(h.p_model, h.jaccard, h.containment, res.weights));
      }
      table = calibrate::tune_leaf_thresholds(leaf_samples(scores), grid, a.min_leaf_support,
                                              std::max(1u, a.workers));
    }
    table.hybrid_weights = res.weights;
  } else {
    throw UsageError("unknown calibration mode '" + mode + "'");
  }
  table.validate();
  write_text(a.output, dump(table.to_json(), 2) + "\n");

  ordered_json report;
  report["mode"] = mode;
  report["samples"] = joined.size();
  report["global_threshold"] = table.global_threshold;
  report["leaves_tuned"] = table.leaf_thresholds.size();
  if (hybrid_f1) report["hybrid_f1"] = *hybrid_f1;
  ordered_json meta = meta_base(g, "calibrate", task);
  meta["report"] = report;
  write_meta(a.output, meta);
  out << dump(report, 2) << '\n';
}

void cmd_evaluate(const Global& g, const EvaluateArgs& a, std::ostream& out) {
  const Task task = dataio::task_from_string(a.task);
  guard({a.input, a.predictions, a.calibration}, {a.output});
  calibrate::CalibrationTable table;
  if (!a.calibration.empty()) {
    table = load_table(a.calibration);
  } else {
    if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) {
      throw ValidationError("--threshold must lie in [0, 1]");
    }
    table.global_threshold = a.threshold;
  }
  const auto rs = load(g, a.input, task);
  const auto ps = load_predictions(a.predictions);
  const auto joined = join(rs, ps);
  if (joined.empty()) throw ValidationError("nothing to evaluate");

  const auto& w = table.hybrid_weights;
  const bool lexical_needed = w.w_j != 0.0 || w.w_c != 0.0;
  std::vector<int> pred, gold;
  std::vector<std::string> langs;
  for (const auto& j : joined) {
    double s = j.pred->prob;
    if (lexical_needed) {
      const auto [jac, con] = lexical_of(j);
      s = lexical::hybrid_score(s, jac, con, w);
    }
    pred.push_back(calibrate::decide(s, table.threshold_for(j.pred->leaf)));
    gold.push_back(label_of(*j.record));
    langs.push_back(j.record->language);
  }
  const auto rep = metrics::evaluate(pred, gold, langs);
  ordered_json report = metrics::to_json(rep);
  if (!a.output.empty()) {
    write_text(a.output, dump(report, 2) + "\n");
    ordered_json meta = meta_base(g, "evaluate", task);
    meta["calibration"] = a.calibration.empty() ? ordered_json(nullptr) : ordered_json(a.calibration);
    write_meta(a.output, meta);
  }
  out << dump(report, 2) << '\n';
}

}  // namespace relforge::cli
