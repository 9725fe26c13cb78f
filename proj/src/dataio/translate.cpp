#include <fstream>
#include <regex>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "relforge/dataio.hpp"

namespace relforge::dataio {

std::vector<std::string> IdentityProvider::translate(const std::vector<std::string>& batch) {
  return batch;
}

LookupProvider::LookupProvider(std::map<std::string, std::string> table)
    : table_(std::move(table)) {}

LookupProvider LookupProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open lookup table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kParse, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(DataErrorKind::kParse, path.string() + ": expected object");
  std::map<std::string, std::string> table;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) {
      throw DataError(DataErrorKind::kParse, path.string() + ": value for '" + k + "' not a string");
    }
    table.emplace(k, v.get<std::string>());
  }
  return LookupProvider(std::move(table));
}

std::vector<std::string> LookupProvider::translate(const std::vector<std::string>& batch) {
  std::vector<std::string> out;
  out.reserve(batch.size());
  for (const auto& s : batch) {
    const auto it = table_.find(s);
    out.push_back(it == table_.end() ? s : it->second);
  }
  return out;
}

RemoteProvider::RemoteProvider(std::string endpoint, double timeout_s) : timeout_s_(timeout_s) {
  static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, re)) {
    throw ValidationError("remote endpoint must look like http://host[:port]/path, got '" +
                          endpoint + "'");
  }
  if (!(timeout_s > 0.0)) throw ValidationError("timeout_s must be positive");
  base_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
}

std::vector<std::string> RemoteProvider::translate(const std::vector<std::string>& batch) {
  httplib::Client client(base_);
  const auto usec = static_cast<long>(timeout_s_ * 1e6);
  client.set_connection_timeout(usec / 1000000, usec % 1000000);
  client.set_read_timeout(usec / 1000000, usec % 1000000);
  client.set_write_timeout(usec / 1000000, usec % 1000000);

  const nlohmann::json body = {{"texts", batch}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw DataError(DataErrorKind::kIo,
                    "remote provider: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw DataError(DataErrorKind::kIo, "remote provider: HTTP " + std::to_string(res->status));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kParse, std::string("remote provider reply: ") + e.what());
  }
  const auto it = reply.find("translations");
  if (it == reply.end() || !it->is_array()) {
    throw DataError(DataErrorKind::kParse, "remote provider reply lacks a 'translations' array");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw DataError(DataErrorKind::kParse, "non-string translation");
    out.push_back(v.get<std::string>());
  }
  return out;
}

ProviderConfig ProviderConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("provider config must be a JSON object");
  ProviderConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "provider") c.provider = v.get<std::string>();
      else if (k == "lookup_path") c.lookup_path = v.get<std::string>();
      else if (k == "endpoint") c.endpoint = v.get<std::string>();
      else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (k == "timeout_s") c.timeout_s = v.get<double>();
      else throw ValidationError("unknown provider config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("provider config: ") + e.what());
  }
  if (c.provider != "identity" && c.provider != "lookup" && c.provider != "remote") {
    throw ValidationError("unknown provider '" + c.provider + "'");
  }
  if (c.provider == "lookup" && !c.lookup_path) throw ValidationError("lookup provider needs lookup_path");
  if (c.provider == "remote" && !c.endpoint) throw ValidationError("remote provider needs endpoint");
  if (c.batch_size == 0) throw ValidationError("batch_size must be positive");
  return c;
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open provider config " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(DataErrorKind::kParse, path.string() + ": " + e.what());
  }
}

std::unique_ptr<TranslationProvider> ProviderConfig::make(
    const std::filesystem::path& base_dir) const {
  if (provider == "lookup") {
    std::filesystem::path p(*lookup_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return std::make_unique<LookupProvider>(LookupProvider::from_file(p));
  }
  if (provider == "remote") return std::make_unique<RemoteProvider>(*endpoint, timeout_s);
  return std::make_unique<IdentityProvider>();
}

nlohmann::ordered_json TranslateReport::to_json() const {
  return {{"provider", provider},          {"requested", requested},
          {"translated", translated},      {"already_present", already_present},
          {"retries", retries},            {"failed_batches", failed_batches},
          {"untranslated", untranslated}};
}

TranslateReport translate(std::vector<Record>& records, TranslationProvider& provider,
                          std::size_t batch_size) {
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  TranslateReport rep;
  rep.provider = provider.name();

  // Each pending slot points at the optional to fill and the source text.
  struct Slot {
    std::optional<std::string>* dst;
    const std::string* src;
  };
  std::vector<Slot> pending;
  for (auto& r : records) {
    if (r.query_en) ++rep.already_present;
    else pending.push_back({&r.query_en, &r.origin_query});
    if (r.task == Task::kQI && r.item_title) {
      if (r.title_en) ++rep.already_present;
      else pending.push_back({&r.title_en, &*r.item_title});
    }
  }
  rep.requested = pending.size();

  for (std::size_t start = 0; start < pending.size(); start += batch_size) {
    const std::size_t end = std::min(pending.size(), start + batch_size);
    std::vector<std::string> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(*pending[i].src);

    std::optional<std::vector<std::string>> reply;
    for (int attempt = 0; attempt < 2 && !reply; ++attempt) {
      if (attempt) ++rep.retries;
      try {
        reply = provider.translate(batch);
      } catch (const std::exception& e) {
        spdlog::warn("translation batch {}..{} failed: {}", start, end, e.what());
      }
    }
    if (!reply) {
      ++rep.failed_batches;
      rep.untranslated += batch.size();
      continue;
    }
    if (reply->size() != batch.size()) {
      throw DataError(DataErrorKind::kContractViolation,
                      "provider '" + rep.provider + "' returned " +
                          std::to_string(reply->size()) + " strings for a batch of " +
                          std::to_string(batch.size()));
    }
    for (std::size_t i = start; i < end; ++i) {
      *pending[i].dst = std::move((*reply)[i - start]);
      ++rep.translated;
    }
  }
  return rep;
}

}  // namespace relforge::dataio
