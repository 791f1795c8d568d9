#include <gtest/gtest.h>

#include "mathlex/text_util.hpp"

namespace mathlex::text {

TEST(TextUtil, NormalizePhraseCollapsesAndLowercases) {
  EXPECT_EQ(normalize_phrase("  Double\t  CATEGORY \n"), "double category");
  EXPECT_EQ(normalize_phrase(""), "");
  EXPECT_EQ(normalize_phrase("   "), "");
}

TEST(TextUtil, SplitKeepsEmptyFields) {
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split_whitespace("  a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(TextUtil, Utf8LengthCountsCodePoints) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("\xCE\xB1-\xE2\x86\x92"), 3u);  // alpha, '-', right arrow
}

TEST(TextUtil, ToLowerLeavesNonAsciiBytes) {
  EXPECT_EQ(to_lower("\xC3\x89tale"), "\xC3\x89tale");
  EXPECT_TRUE(starts_with_ci("List of topics", "list of"));
  EXPECT_FALSE(starts_with_ci("Li", "list"));
}

}  // namespace mathlex::text
