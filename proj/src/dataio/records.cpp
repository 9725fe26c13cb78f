#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>

#include "relforge/dataio.hpp"

namespace relforge::dataio {

namespace {

constexpr std::size_t kMaxMessages = 20;

constexpr std::array<std::string_view, 8> kTsvColumns = {
    "id", "language", "origin_query", "query_en", "cate_path", "item_title", "title_en", "label"};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void strip_line(std::string& line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

int parse_label(const nlohmann::json& v, std::size_t line) {
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<long long>();
    if (n == 0 || n == 1) return static_cast<int>(n);
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "0" || s == "1") return s[0] - '0';
  }
  throw DataError(DataErrorKind::kInvalidLabel, "label must be 0 or 1, got " + v.dump(), line);
}

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key,
                                      std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw DataError(DataErrorKind::kParse, std::string("field '") + key + "' must be a string",
                    line);
  }
  return it->get<std::string>();
}

std::string required_string(const nlohmann::json& j, const char* key, std::size_t line) {
  auto v = opt_string(j, key, line);
  if (!v) {
    throw DataError(DataErrorKind::kMissingField, std::string("missing field '") + key + "'",
                    line);
  }
  return std::move(*v);
}

std::string escape_tsv(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_tsv(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char n = s[++i];
      out += n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : n;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find('\t', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void note_skip(ReadReport* report, const DataError& e) {
  if (report == nullptr) return;
  ++report->skipped;
  ++report->errors_by_kind[to_string(e.kind())];
  if (report->messages.size() < kMaxMessages) report->messages.push_back(e.what());
}

std::string dump(const nlohmann::ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::kQC ? "QC" : "QI"; }

Task task_from_string(std::string_view s) {
  const auto l = lower_ascii(s);
  if (l == "qc") return Task::kQC;
  if (l == "qi") return Task::kQI;
  throw ValidationError("unknown task '" + std::string(s) + "' (expected QC or QI)");
}

Format format_from_string(std::string_view s) {
  const auto l = lower_ascii(s);
  if (l == "jsonl") return Format::kJsonl;
  if (l == "tsv") return Format::kTsv;
  throw ValidationError("unknown format '" + std::string(s) + "' (expected jsonl or tsv)");
}

Format format_for_path(const std::filesystem::path& path) {
  return lower_ascii(path.extension().string()) == ".tsv" ? Format::kTsv : Format::kJsonl;
}

const std::string& Record::query_text() const { return query_en ? *query_en : origin_query; }

const std::string& Record::target_text() const {
  static const std::string kEmpty;
  if (task == Task::kQI) {
    if (title_en) return *title_en;
    return item_title ? *item_title : kEmpty;
  }
  return cate_path ? *cate_path : kEmpty;
}

Record record_from_json(const nlohmann::json& j, Task task, std::size_t line) {
  if (!j.is_object()) throw DataError(DataErrorKind::kParse, "record is not a JSON object", line);
  Record r;
  r.task = task;
  const auto id = j.find("id");
  if (id == j.end() || id->is_null()) {
    throw DataError(DataErrorKind::kMissingField, "missing field 'id'", line);
  }
  if (id->is_string()) {
    r.id = id->get<std::string>();
  } else if (id->is_number_integer() || id->is_number_unsigned()) {
    r.id = id->dump();
  } else {
    throw DataError(DataErrorKind::kParse, "field 'id' must be a string or integer", line);
  }
  if (r.id.empty()) throw DataError(DataErrorKind::kMissingField, "empty 'id'", line);
  r.language = required_string(j, "language", line);
  r.origin_query = required_string(j, "origin_query", line);
  r.query_en = opt_string(j, "query_en", line);
  r.cate_path = opt_string(j, "cate_path", line);
  r.item_title = opt_string(j, "item_title", line);
  r.title_en = opt_string(j, "title_en", line);
  if (task == Task::kQC && !r.cate_path) {
    throw DataError(DataErrorKind::kMissingField, "QC record without 'cate_path'", line);
  }
  if (task == Task::kQI && !r.item_title) {
    throw DataError(DataErrorKind::kMissingField, "QI record without 'item_title'", line);
  }
  if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
    r.label = parse_label(*it, line);
  }
  return r;
}

nlohmann::ordered_json to_json(const Record& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["language"] = r.language;
  j["origin_query"] = r.origin_query;
  if (r.query_en) j["query_en"] = *r.query_en;
  if (r.cate_path) j["cate_path"] = *r.cate_path;
  if (r.item_title) j["item_title"] = *r.item_title;
  if (r.title_en) j["title_en"] = *r.title_en;
  if (r.label) j["label"] = *r.label;
  return j;
}

std::vector<Record> parse_records(std::istream& in, Format format, Task task,
                                  const ReadOptions& options, ReadReport* report) {
  ReadReport local;
  ReadReport& rep = report != nullptr ? *report : local;
  rep = {};
  std::vector<Record> out;
  std::set<std::string> seen;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    strip_line(line, line_no);
    rep.lines = line_no;
    if (blank(line)) continue;
    try {
      Record r;
      if (format == Format::kJsonl) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
          throw DataError(DataErrorKind::kParse, std::string("invalid JSON: ") + e.what(),
                          line_no);
        }
        r = record_from_json(j, task, line_no);
      } else {
        const auto cells = split_tabs(line);
        if (header.empty()) {
          header = cells;
          for (const auto& h : header) {
            if (std::find(kTsvColumns.begin(), kTsvColumns.end(), h) == kTsvColumns.end()) {
              throw DataError(DataErrorKind::kParse, "unknown TSV column '" + h + "'", line_no);
            }
          }
          continue;
        }
        if (cells.size() != header.size()) {
          throw DataError(DataErrorKind::kParse,
                          "expected " + std::to_string(header.size()) + " TSV cells, got " +
                              std::to_string(cells.size()),
                          line_no);
        }
        nlohmann::json j = nlohmann::json::object();
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c].empty() && header[c] != "origin_query") continue;
          j[header[c]] = unescape_tsv(cells[c]);
        }
        r = record_from_json(j, task, line_no);
      }
      if (!seen.insert(r.id).second) {
        throw DataError(DataErrorKind::kDuplicateId, "duplicate id '" + r.id + "'", line_no);
      }
      out.push_back(std::move(r));
    } catch (const DataError& e) {
      if (options.strict || (format == Format::kTsv && header.empty())) throw;
      note_skip(&rep, e);
    }
  }
  if (in.bad()) throw DataError(DataErrorKind::kIo, "read error");
  rep.records = out.size();
  return out;
}

std::vector<Record> read_records(const std::filesystem::path& path, Format format, Task task,
                                 const ReadOptions& options, ReadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open " + path.string());
  return parse_records(in, format, task, options, report);
}

void write_records(std::ostream& out, const std::vector<Record>& records, Format format) {
  if (format == Format::kJsonl) {
    for (const auto& r : records) out << dump(to_json(r)) << '\n';
    return;
  }
  for (std::size_t c = 0; c < kTsvColumns.size(); ++c) {
    out << (c ? "\t" : "") << kTsvColumns[c];
  }
  out << '\n';
  for (const auto& r : records) {
    const std::array<std::optional<std::string>, 8> cells = {
        r.id, r.language, r.origin_query, r.query_en, r.cate_path, r.item_title, r.title_en,
        r.label ? std::optional<std::string>(std::to_string(*r.label)) : std::nullopt};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << (c ? "\t" : "") << (cells[c] ? escape_tsv(*cells[c]) : "");
    }
    out << '\n';
  }
}

void write_records(const std::filesystem::path& path, const std::vector<Record>& records,
                   Format format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write " + path.string());
  write_records(out, records, format);
  out.flush();
  if (!out) throw DataError(DataErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace relforge::dataio
