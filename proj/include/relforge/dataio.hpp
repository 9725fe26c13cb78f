#pragma once

// Record schema, JSONL/TSV readers and writers, the per-language validation
// split, translation providers and prediction files.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relforge/error.hpp"

namespace relforge::dataio {

enum class Task { kQC, kQI };

std::string_view to_string(Task task);
// "QC"/"QI", case-insensitive. Throws ValidationError otherwise.
Task task_from_string(std::string_view s);

enum class Format { kJsonl, kTsv };

Format format_from_string(std::string_view s);
// ".tsv" means TSV, anything else JSONL.
Format format_for_path(const std::filesystem::path& path);

struct Record {
  std::string id;
  Task task = Task::kQC;
  std::string language;
  std::string origin_query;
  std::optional<std::string> query_en;
  std::optional<std::string> cate_path;
  std::optional<std::string> item_title;
  std::optional<std::string> title_en;
  std::optional<int> label;

  // query_en when present, else origin_query.
  const std::string& query_text() const;
  // QI: title_en or item_title. QC: cate_path.
  const std::string& target_text() const;

  bool operator==(const Record&) const = default;
};

struct ReadOptions {
  bool strict = true;
};

struct ReadReport {
  std::size_t lines = 0;
  std::size_t records = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> errors_by_kind;
  // First few skipped-line messages, for the user.
  std::vector<std::string> messages;
};

// Strict mode throws the first DataError (with its line number); lenient mode
// skips bad lines and counts them in `report`.
std::vector<Record> parse_records(std::istream& in, Format format, Task task,
                                  const ReadOptions& options = {},
                                  ReadReport* report = nullptr);
std::vector<Record> read_records(const std::filesystem::path& path, Format format, Task task,
                                 const ReadOptions& options = {},
                                 ReadReport* report = nullptr);

nlohmann::ordered_json to_json(const Record& r);
// Throws DataError with `line`.
Record record_from_json(const nlohmann::json& j, Task task, std::size_t line = 0);

void write_records(std::ostream& out, const std::vector<Record>& records, Format format);
void write_records(const std::filesystem::path& path, const std::vector<Record>& records,
                   Format format);

struct Split {
  std::vector<Record> train;
  std::vector<Record> val;
  std::vector<std::string> warnings;
};

// Per language: a seeded shuffle, then floor(ratio * n) records to train.
// Languages with fewer than 2 records go entirely to train, with a warning.
// Both halves keep input order.
Split split_validation(const std::vector<Record>& records, double ratio = 0.9,
                       std::uint64_t seed = 42);

// Batch of strings in, equal-length batch out.
class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> translate(const std::vector<std::string>& batch) = 0;
};

class IdentityProvider : public TranslationProvider {
 public:
  std::string name() const override { return "identity"; }
  std::vector<std::string> translate(const std::vector<std::string>& batch) override;
};

// Exact-match dictionary; unknown strings pass through unchanged.
class LookupProvider : public TranslationProvider {
 public:
  explicit LookupProvider(std::map<std::string, std::string> table);
  // JSON object {"source": "translation", ...}.
  static LookupProvider from_file(const std::filesystem::path& path);

  std::string name() const override { return "lookup"; }
  std::vector<std::string> translate(const std::vector<std::string>& batch) override;

 private:
  std::map<std::string, std::string> table_;
};

// POSTs {"texts": [...]} to an http:// endpoint and expects
// {"translations": [...]} back.
class RemoteProvider : public TranslationProvider {
 public:
  explicit RemoteProvider(std::string endpoint, double timeout_s = 30.0);

  std::string name() const override { return "remote"; }
  std::vector<std::string> translate(const std::vector<std::string>& batch) override;

 private:
  std::string base_;
  std::string path_;
  double timeout_s_;
};

struct ProviderConfig {
  std::string provider = "identity";
  std::optional<std::string> lookup_path;
  std::optional<std::string> endpoint;
  std::size_t batch_size = 32;
  double timeout_s = 30.0;

  static ProviderConfig from_json(const nlohmann::json& j);
  static ProviderConfig load(const std::filesystem::path& path);
  // Relative lookup paths resolve against `base_dir`.
  std::unique_ptr<TranslationProvider> make(const std::filesystem::path& base_dir = {}) const;
};

struct TranslateReport {
  std::string provider;
  std::size_t requested = 0;    // strings sent for translation
  std::size_t translated = 0;
  std::size_t already_present = 0;
  std::size_t retries = 0;
  std::size_t failed_batches = 0;
  std::size_t untranslated = 0;  // strings left without a translation

  nlohmann::ordered_json to_json() const;
};

// Fills query_en (and title_en for QI) where missing. A batch whose provider
// call throws is retried once, then left untranslated. A reply of the wrong
// length throws DataError(kContractViolation).
TranslateReport translate(std::vector<Record>& records, TranslationProvider& provider,
                          std::size_t batch_size = 32);

struct Prediction {
  std::string id;
  double prob = 0.0;
  std::optional<std::string> leaf;
  // Present in scored files.
  std::optional<double> jaccard;
  std::optional<double> containment;
  std::optional<double> score;

  bool operator==(const Prediction&) const = default;
};

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path);
void write_predictions(std::ostream& out, const std::vector<Prediction>& preds);
// Throws DataError(kOutOfRange) with the line number for a value outside [0, 1].
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
std::vector<Prediction> parse_predictions(std::istream& in);

}  // namespace relforge::dataio
