#include "relforge/pathcat.hpp"

#include "relforge/error.hpp"
#include "unicode.hpp"

namespace relforge::pathcat {

namespace {

std::string trim(std::string_view segment) {
  std::u32string s = unicode::decode_utf8(segment);
  std::size_t b = 0, e = s.size();
  while (b < e && unicode::is_whitespace(s[b])) ++b;
  while (e > b && unicode::is_whitespace(s[e - 1])) --e;
  return unicode::encode_utf8(s.substr(b, e - b));
}

}  // namespace

CategoryPath parse_path(std::string_view raw, std::string_view separator) {
  if (separator.empty()) {
    throw ValidationError("category path separator must not be empty");
  }
  CategoryPath path;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = raw.find(separator, start);
    const auto segment = raw.substr(start, pos == std::string_view::npos
                                               ? std::string_view::npos
                                               : pos - start);
    std::string level = trim(segment);
    if (level.empty()) {
      throw DataError(DataErrorKind::kMalformedPath,
                      "empty level " + std::to_string(path.levels.size() + 1) +
                          " in category path '" + std::string(raw) + "'");
    }
    path.levels.push_back(std::move(level));
    if (pos == std::string_view::npos) break;
    start = pos + separator.size();
  }
  return path;
}

std::string inject_levels(const CategoryPath& path) {
  std::string out;
  for (std::size_t i = 0; i < path.levels.size(); ++i) {
    if (i > 0) out += ' ';
    out += "[L" + std::to_string(i + 1) + "] ";
    out += path.levels[i];
  }
  return out;
}

const std::string& leaf_of(const CategoryPath& path) {
  if (path.levels.empty()) throw InternalError("leaf_of on an empty category path");
  return path.levels.back();
}

std::string join_path(const CategoryPath& path, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < path.levels.size(); ++i) {
    if (i > 0) out += separator;
    out += path.levels[i];
  }
  return out;
}

}  // namespace relforge::pathcat
