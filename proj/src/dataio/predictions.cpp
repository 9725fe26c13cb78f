#include <cmath>
#include <fstream>

#include "relforge/dataio.hpp"

namespace relforge::dataio {

namespace {

void check_unit(double v, const char* what, std::size_t line) {
  if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) {
    throw DataError(DataErrorKind::kOutOfRange,
                    std::string(what) + " must lie in [0, 1], got " + std::to_string(v), line);
  }
}

std::optional<double> opt_unit(const nlohmann::json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw DataError(DataErrorKind::kParse, std::string("'") + key + "' must be a number", line);
  }
  const double v = it->get<double>();
  check_unit(v, key, line);
  return v;
}

}  // namespace

void write_predictions(std::ostream& out, const std::vector<Prediction>& preds) {
  for (const auto& p : preds) {
    if (p.id.empty()) throw ValidationError("prediction with empty id");
    check_unit(p.prob, "prob", 0);
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["prob"] = p.prob;
    if (p.leaf) j["leaf"] = *p.leaf;
    if (p.jaccard) j["jaccard"] = *p.jaccard;
    if (p.containment) j["containment"] = *p.containment;
    if (p.score) j["score"] = *p.score;
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write " + path.string());
  write_predictions(out, preds);
  out.flush();
  if (!out) throw DataError(DataErrorKind::kIo, "failed writing " + path.string());
}

std::vector<Prediction> parse_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(DataErrorKind::kParse, std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw DataError(DataErrorKind::kParse, "not a JSON object", line_no);
    Prediction p;
    const auto id = j.find("id");
    if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
      throw DataError(DataErrorKind::kMissingField, "missing or empty 'id'", line_no);
    }
    p.id = id->get<std::string>();
    auto prob = opt_unit(j, "prob", line_no);
    if (!prob) throw DataError(DataErrorKind::kMissingField, "missing 'prob'", line_no);
    p.prob = *prob;
    if (const auto it = j.find("leaf"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) throw DataError(DataErrorKind::kParse, "'leaf' must be a string", line_no);
      p.leaf = it->get<std::string>();
    }
    p.jaccard = opt_unit(j, "jaccard", line_no);
    p.containment = opt_unit(j, "containment", line_no);
    p.score = opt_unit(j, "score", line_no);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open " + path.string());
  return parse_predictions(in);
}

}  // namespace relforge::dataio
