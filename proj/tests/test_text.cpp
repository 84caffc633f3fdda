#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "mispron/text.hpp"

using mispron::tokenize;

namespace {

std::vector<std::string> norms(const std::vector<mispron::Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.norm);
  return out;
}

bool norm_charset_ok(const std::string& s) {
  if (s.empty() || s.front() == '\'' || s.front() == '-' || s.back() == '\'' || s.back() == '-') return false;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(norms(tokenize("The Rainbow, passage.")), (std::vector<std::string>{"the", "rainbow", "passage"}));
}

TEST(Tokenize, EmptyInput) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("   \n\t ").empty());
}

TEST(Tokenize, KeepsInternalApostropheAndHyphen) {
  EXPECT_EQ(norms(tokenize("don't stop-go")), (std::vector<std::string>{"don't", "stop-go"}));
}

TEST(Tokenize, DropsPurePunctuationAndReindexes) {
  const auto toks = tokenize("well -- \"so\" ... yes");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(norms(toks), (std::vector<std::string>{"well", "so", "yes"}));
  for (std::size_t i = 0; i < toks.size(); ++i) EXPECT_EQ(toks[i].index, i);
  EXPECT_EQ(toks[1].surface, "\"so\"");
}

TEST(Tokenize, FoldsTypographicQuotesAndDashes) {
  // Right single quote inside a word, em dash between words, curly double quotes.
  EXPECT_EQ(norms(tokenize("don\xE2\x80\x99t \xE2\x80\x9Cgo\xE2\x80\x9D well\xE2\x80\x94really")),
            (std::vector<std::string>{"don't", "go", "well-really"}));
  // No-break space separates tokens.
  EXPECT_EQ(norms(tokenize("a\xC2\xA0" "b")), (std::vector<std::string>{"a", "b"}));
}

TEST(Tokenize, NumeralsStayDigits) { EXPECT_EQ(norms(tokenize("Page 42.")), (std::vector<std::string>{"page", "42"})); }

TEST(Tokenize, ArrowIsNotAWord) {
  EXPECT_EQ(norms(tokenize("find \xE2\x86\x92 found")), (std::vector<std::string>{"find", "found"}));
}

TEST(Tokenize, StripsEdgeApostrophes) {
  EXPECT_EQ(norms(tokenize("'tis the dogs' -bone-")), (std::vector<std::string>{"tis", "the", "dogs", "bone"}));
}

TEST(Tokenize, LowercasesLatin1) { EXPECT_EQ(tokenize("\xC3\x89T\xC3\x89")[0].norm, "\xC3\xA9t\xC3\xA9"); }

// Invariants over random ASCII soup: charset, consecutive indices, order,
// and idempotence of tokenize(join(norms)).
TEST(TokenizeProperty, InvariantsOnRandomAscii) {
  std::mt19937 rng(7);
  const std::string alphabet = "abcXYZ019 '-.,;:!?\"()\t\n";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 40);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string text;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) text += alphabet[pick(rng)];
    const auto toks = tokenize(text);
    std::size_t search_from = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      EXPECT_EQ(toks[i].index, i);
      EXPECT_TRUE(norm_charset_ok(toks[i].norm)) << toks[i].norm;
      const auto at = text.find(toks[i].surface, search_from);
      ASSERT_NE(at, std::string::npos) << "surface order broken in: " << text;
      search_from = at + toks[i].surface.size();
    }
    EXPECT_EQ(norms(tokenize(mispron::join_norms(toks))), norms(toks));
  }
}
