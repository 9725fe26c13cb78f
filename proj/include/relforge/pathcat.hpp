#pragma once

// Category paths ("Electronics,Audio,Headphones") and depth-marker encoding.

#include <string>
#include <string_view>
#include <vector>

namespace relforge::pathcat {

struct CategoryPath {
  std::vector<std::string> levels;

  std::size_t depth() const noexcept { return levels.size(); }
  bool operator==(const CategoryPath&) const = default;
};

inline constexpr std::string_view kDefaultSeparator = ",";

// Splits on `separator` and trims Unicode whitespace around each segment.
// Throws DataError(kMalformedPath) for empty input or an empty segment.
CategoryPath parse_path(std::string_view raw,
                        std::string_view separator = kDefaultSeparator);

// "[L1] a [L2] b ... [Lk] z"
std::string inject_levels(const CategoryPath& path);

const std::string& leaf_of(const CategoryPath& path);

// Levels joined back with `separator` (no padding); used as the full-path key.
std::string join_path(const CategoryPath& path,
                      std::string_view separator = kDefaultSeparator);

}  // namespace relforge::pathcat
