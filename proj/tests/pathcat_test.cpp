#include <random>
#include <string>

#include <gtest/gtest.h>

#include "relforge/error.hpp"
#include "relforge/pathcat.hpp"

namespace pc = relforge::pathcat;

namespace {

std::size_t count_markers(const std::string& s) {
  std::size_t n = 0;
  for (std::size_t pos = s.find("[L"); pos != std::string::npos;
       pos = s.find("[L", pos + 1)) {
    ++n;
  }
  return n;
}

}  // namespace

TEST(ParsePathTest, SplitsOnComma) {
  const auto p = pc::parse_path("Electronics,Audio,Headphones");
  EXPECT_EQ(p.levels, (std::vector<std::string>{"Electronics", "Audio", "Headphones"}));
  EXPECT_EQ(pc::parse_path("Electronics").levels,
            std::vector<std::string>{"Electronics"});
}

TEST(ParsePathTest, TrimsSegments) {
  const auto p = pc::parse_path("  Home & Garden ,\tKitchen , Knives ");
  EXPECT_EQ(p.levels, (std::vector<std::string>{"Home & Garden", "Kitchen", "Knives"}));
}

TEST(ParsePathTest, CustomSeparator) {
  const auto p = pc::parse_path("Fashion > Shoes > Sneakers", ">");
  EXPECT_EQ(p.levels, (std::vector<std::string>{"Fashion", "Shoes", "Sneakers"}));
  EXPECT_EQ(pc::parse_path("a,b > c", ">").levels,
            (std::vector<std::string>{"a,b", "c"}));
}

TEST(ParsePathTest, MalformedPaths) {
  for (const char* raw : {"a,,b", "", "   ", ",a", "a,", "a, ,b"}) {
    try {
      pc::parse_path(raw);
      ADD_FAILURE() << "accepted '" << raw << "'";
    } catch (const relforge::DataError& e) {
      EXPECT_EQ(e.kind(), relforge::DataErrorKind::kMalformedPath) << raw;
    }
  }
  EXPECT_THROW(pc::parse_path("a", ""), relforge::ValidationError);
}

TEST(InjectLevelsTest, Examples) {
  EXPECT_EQ(pc::inject_levels(pc::parse_path("Electronics,Audio,Headphones")),
            "[L1] Electronics [L2] Audio [L3] Headphones");
  EXPECT_EQ(pc::inject_levels({{"Electronics"}}), "[L1] Electronics");
  EXPECT_EQ(pc::inject_levels({{"a", "b", "c", "d", "e"}}),
            "[L1] a [L2] b [L3] c [L4] d [L5] e");
}

TEST(InjectLevelsTest, DeepPathsAreUnbounded) {
  pc::CategoryPath p;
  for (int i = 0; i < 12; ++i) p.levels.push_back("n" + std::to_string(i));
  const std::string s = pc::inject_levels(p);
  EXPECT_NE(s.find("[L12] n11"), std::string::npos);
  EXPECT_EQ(count_markers(s), 12u);
}

TEST(LeafOfTest, Examples) {
  EXPECT_EQ(pc::leaf_of(pc::parse_path("Electronics,Audio,Headphones")), "Headphones");
  EXPECT_EQ(pc::leaf_of({{"Electronics"}}), "Electronics");
  EXPECT_EQ(pc::leaf_of({{"a", "b"}}), "b");
}

TEST(PathPropertyTest, MarkersAndLeafOnRandomPaths) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcxyz &-";
  for (int iter = 0; iter < 2000; ++iter) {
    const int depth = 1 + static_cast<int>(rng() % 9);
    std::string raw;
    std::vector<std::string> names;
    for (int d = 0; d < depth; ++d) {
      std::string name(1, static_cast<char>('a' + rng() % 26));
      const int extra = static_cast<int>(rng() % 8);
      for (int k = 0; k < extra; ++k) name += alphabet[rng() % alphabet.size()];
      while (name.back() == ' ') name.pop_back();
      names.push_back(name);
      if (d > 0) raw += rng() % 2 ? "," : " , ";
      raw += name;
    }
    const auto path = pc::parse_path(raw);
    ASSERT_EQ(path.levels, names) << raw;
    const std::string injected = pc::inject_levels(path);
    ASSERT_EQ(count_markers(injected), static_cast<std::size_t>(depth));
    std::size_t pos = 0;
    for (int d = 1; d <= depth; ++d) {
      const std::string marker = "[L" + std::to_string(d) + "] ";
      const std::size_t at = injected.find(marker, pos);
      ASSERT_NE(at, std::string::npos) << injected;
      pos = at + marker.size();
    }
    std::string tail = raw.substr(raw.rfind(',') == std::string::npos ? 0 : raw.rfind(',') + 1);
    while (!tail.empty() && tail.front() == ' ') tail.erase(tail.begin());
    ASSERT_EQ(pc::leaf_of(path), tail);
  }
}

TEST(JoinPathTest, RoundTripsCanonicalForm) {
  const auto p = pc::parse_path("a , b,c");
  EXPECT_EQ(pc::join_path(p), "a,b,c");
  EXPECT_EQ(pc::parse_path(pc::join_path(p)), p);
}
