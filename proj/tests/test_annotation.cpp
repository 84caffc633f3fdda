#include <gtest/gtest.h>

#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mispron/annotation.hpp"
#include "test_paths.hpp"

using namespace mispron;

namespace {

std::vector<LabelRegion> labels(const std::string& text) {
  std::istringstream in(text);
  return parse_labels(in, "t.txt");
}

template <class E>
std::size_t failing_line(const std::string& text) {
  try {
    labels(text);
  } catch (const E& e) {
    return e.line_no();
  }
  return 0;
}

}  // namespace

TEST(ParseLabels, ReadsArrowLabelVerbatim) {
  const auto r = labels("12.350\t13.800\tword replacement find \xE2\x86\x92 found\n");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r[0].start_s, 12.35);
  EXPECT_DOUBLE_EQ(r[0].end_s, 13.80);
  EXPECT_EQ(r[0].raw_label, "word replacement find \xE2\x86\x92 found");
}

TEST(ParseLabels, ZeroLengthAccepted) {
  const auto r = labels("0.0\t0.0\tprolonged pause\n");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].start_s, r[0].end_s);
}

TEST(ParseLabels, NonNumericTimeIsMalformed) { EXPECT_EQ(failing_line<MalformedLabelLine>("1.0\tabc\tx\n"), 1u); }

TEST(ParseLabels, TooFewFieldsIsMalformed) {
  EXPECT_EQ(failing_line<MalformedLabelLine>("1.0\t2.0\tok\n3.0\t4.0\n"), 2u);
}

TEST(ParseLabels, EndBeforeStartIsNegativeDuration) {
  EXPECT_EQ(failing_line<NegativeDuration>("1.0\t2.0\tok\n\n5.0\t4.0\tbad\n"), 3u);
}

TEST(ParseLabels, SortsByStartAndSkipsSpectralLines) {
  const auto r = labels("5.0\t6.0\tb\n\\\t100.0\t2000.0\n1.0\t2.0\ta\r\n");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].raw_label, "a");
  EXPECT_EQ(r[1].raw_label, "b");
}

TEST(ParseLabels, MissingFileIsInputError) {
  EXPECT_THROW(parse_label_file("/nonexistent/labels.txt"), InputError);
}

TEST(ParseLabelsProperty, RoundTripToMilliseconds) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> ms(0, 600000), dur(0, 5000), pick(0, 3);
  const std::vector<std::string> texts = {"word replacement find \xE2\x86\x92 found", "prolonged pause",
                                          "sound deletion  likes -> like", "repetition he he"};
  for (int iter = 0; iter < 200; ++iter) {
    std::string file;
    for (int k = 0; k < 5; ++k) {
      const int a = ms(rng), b = a + dur(rng);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%d.%03d\t%d.%03d\t", a / 1000, a % 1000, b / 1000, b % 1000);
      file += buf + texts[static_cast<std::size_t>(pick(rng))] + "\n";
    }
    const auto first = labels(file);
    std::ostringstream out;
    write_labels(out, first);
    const auto second = labels(out.str());
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      EXPECT_NEAR(first[i].start_s, second[i].start_s, 5e-4);
      EXPECT_NEAR(first[i].end_s, second[i].end_s, 5e-4);
      EXPECT_EQ(first[i].raw_label, second[i].raw_label);
    }
    std::ostringstream again;
    write_labels(again, second);
    EXPECT_EQ(out.str(), again.str());
  }
}

TEST(MapLabel, WordReplacementKeepsExactError) {
  EXPECT_EQ(map_label("word replacement find \xE2\x86\x92 found"),
            (MappedLabel{ErrorClass::WordSubstitution, "find \xE2\x86\x92 found"}));
}

TEST(MapLabel, ProlongedPauseHasNoRemainder) {
  EXPECT_EQ(map_label("prolonged pause"), (MappedLabel{ErrorClass::Prosodic, ""}));
}

TEST(MapLabel, UnmappedLabelNamesTheLabel) {
  try {
    map_label("gibberish xyz");
    FAIL();
  } catch (const UnmappedLabel& e) {
    EXPECT_EQ(e.label(), "gibberish xyz");
  }
}

TEST(MapLabel, CaseInsensitiveAndWordBoundary) {
  EXPECT_EQ(map_label("Sound Deletion: likes -> like").error_class, ErrorClass::PhonemeDeletion);
  EXPECT_EQ(map_label("Sound Deletion: likes -> like").exact_error, "likes -> like");
  // "pauses" must not be read as "pause" followed by "s".
  EXPECT_THROW(map_label("pauses here"), UnmappedLabel);
  EXPECT_THROW(map_label("repetitions"), UnmappedLabel);
}

TEST(MapLabel, LongestPhraseWins) {
  EXPECT_EQ(map_label("word repetition the the"), (MappedLabel{ErrorClass::Repetition, "the the"}));
  EXPECT_EQ(map_label("strained voice"), (MappedLabel{ErrorClass::Prosodic, ""}));
}

TEST(MapLabelProperty, EveryTablePhraseMapsToItsClass) {
  std::set<ErrorClass> seen;
  for (const auto& rule : kLabelKeywords) {
    const auto m = map_label(rule.phrase);
    EXPECT_EQ(m.error_class, rule.error_class) << rule.phrase;
    EXPECT_EQ(m.exact_error, "") << rule.phrase;
    const auto with_tail = map_label(std::string(rule.phrase) + " x");
    EXPECT_EQ(with_tail.error_class, rule.error_class) << rule.phrase;
    seen.insert(rule.error_class);
  }
  EXPECT_EQ(seen.size(), kErrorClasses.size());
}

TEST(Overrides, TakePrecedenceOverKeywords) {
  std::istringstream in("raw_label,error_class\nmumbled word,PhonemeSubstitution\n\"repetition, sort of\",Prosodic\n");
  const auto ov = LabelOverrides::parse(in);
  EXPECT_EQ(ov.size(), 2u);
  EXPECT_EQ(map_label("mumbled word", ov), (MappedLabel{ErrorClass::PhonemeSubstitution, ""}));
  EXPECT_EQ(map_label("repetition, sort of", ov), (MappedLabel{ErrorClass::Prosodic, "sort of"}));
  EXPECT_EQ(map_label("repetition he he", ov).error_class, ErrorClass::Repetition);
}

TEST(Overrides, ExactErrorColumn) {
  std::istringstream in("raw_label,error_class,exact_error\nodd one,WordSubstitution,find -> found\n");
  const auto ov = LabelOverrides::parse(in);
  EXPECT_EQ(map_label("odd one", ov), (MappedLabel{ErrorClass::WordSubstitution, "find -> found"}));
}

TEST(Overrides, BadHeaderOrClassIsRejected) {
  std::istringstream no_header("mumbled word,PhonemeSubstitution\n");
  EXPECT_THROW(LabelOverrides::parse(no_header), MalformedOverrideLine);
  std::istringstream bad_class("raw_label,error_class\nx,Whistling\n");
  EXPECT_THROW(LabelOverrides::parse(bad_class), MalformedOverrideLine);
}

TEST(MapAnnotations, FixtureFileMapsWithOverrides) {
  const auto regions = parse_label_file(mispron_test::fixtures("S03.labels.txt"));
  EXPECT_THROW(map_annotations(regions), UnmappedLabel);
  const auto anns = map_annotations(regions, LabelOverrides::load(mispron_test::fixtures("overrides.csv")));
  ASSERT_EQ(anns.size(), regions.size());
  for (std::size_t i = 0; i < anns.size(); ++i) {
    EXPECT_EQ(anns[i].raw_label, regions[i].raw_label);
    EXPECT_GE(anns[i].end_s, anns[i].start_s);
  }
}
