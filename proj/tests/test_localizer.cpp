#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "mispron/localizer.hpp"
#include "oracles.hpp"

using namespace mispron;

namespace {

DetectedError det(double s, double e) {
  DetectedError d;
  d.start_s = s;
  d.end_s = e;
  d.ops = {EditOp::substitute(0, 0)};
  return d;
}

TherapistAnnotation ann(double s, double e, ErrorClass c = ErrorClass::WordSubstitution) {
  return TherapistAnnotation{s, e, "x", c, ""};
}

std::vector<Token> ref_tokens(std::size_t n) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Token{"w" + std::to_string(i), "w" + std::to_string(i), i});
  return out;
}

ErrorRun deletion_at(std::size_t ref_pos, std::size_t hyp_pos) {
  return ErrorRun{{EditOp::del(ref_pos)}, ref_pos, ref_pos + 1, hyp_pos, hyp_pos};
}

}  // namespace

TEST(TimestampRuns, SpanIsMinMaxOfHypWords) {
  const std::vector<TimedWord> hyp{{"a", 1.0, 1.4}, {"b", 1.5, 2.0}};
  const std::vector<ErrorRun> runs{{{EditOp::substitute(0, 0), EditOp::substitute(1, 1)}, 0, 2, 0, 2}};
  const auto d = timestamp_runs(runs, ref_tokens(2), hyp);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].start_s, 1.0);
  EXPECT_EQ(d[0].end_s, 2.0);
  EXPECT_EQ(d[0].ref_text, "w0 w1");
  EXPECT_EQ(d[0].hyp_text, "a b");
}

TEST(TimestampRuns, DeletionTakesTheGap) {
  const std::vector<TimedWord> hyp{{"a", 2.5, 3.0}, {"b", 3.6, 4.0}};
  const auto d = timestamp_runs(std::vector{deletion_at(1, 1)}, ref_tokens(3), hyp);
  EXPECT_EQ(d[0].start_s, 3.0);
  EXPECT_EQ(d[0].end_s, 3.6);
  EXPECT_EQ(d[0].ref_text, "w1");
  EXPECT_EQ(d[0].hyp_text, "");
}

TEST(TimestampRuns, DeletionAtEdges) {
  const std::vector<TimedWord> hyp{{"a", 0.8, 1.2}};
  const auto before = timestamp_runs(std::vector{deletion_at(0, 0)}, ref_tokens(2), hyp);
  EXPECT_EQ(before[0].start_s, 0.8);
  EXPECT_EQ(before[0].end_s, 0.8);
  const auto after = timestamp_runs(std::vector{deletion_at(1, 1)}, ref_tokens(2), hyp);
  EXPECT_EQ(after[0].start_s, 1.2);
  EXPECT_EQ(after[0].end_s, 1.2);
  const auto empty = timestamp_runs(std::vector{deletion_at(0, 0)}, ref_tokens(1), std::vector<TimedWord>{});
  EXPECT_EQ(empty[0].start_s, 0.0);
  EXPECT_EQ(empty[0].end_s, 0.0);
}

TEST(TimestampRuns, BadRunsAreRejected) {
  const std::vector<TimedWord> hyp{{"a", 0.8, 1.2}};
  EXPECT_THROW(timestamp_runs(std::vector{ErrorRun{}}, ref_tokens(1), hyp), EmptyRun);
  EXPECT_THROW(timestamp_runs(std::vector{deletion_at(4, 0)}, ref_tokens(1), hyp), IndexOutOfRange);
}

TEST(Score, SingleOverlap) {
  const std::vector d{det(1.5, 2.5)};
  const std::vector a{ann(1.0, 2.0)};
  const auto m = score_localization(d, a);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 0u);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f_score, 1.0);
}

TEST(Score, Disjoint) {
  const auto m = score_localization(std::vector{det(3.0, 4.0)}, std::vector{ann(1.0, 2.0)});
  EXPECT_EQ(m.tp, 0u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f_score, 0.0);
}

TEST(Score, HalfAndHalf) {
  const auto m = score_localization(std::vector{det(1.5, 1.8), det(10, 11)}, std::vector{ann(1, 2), ann(5, 6)});
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 0.5);
  EXPECT_DOUBLE_EQ(m.f_score, 0.5);
}

TEST(Score, TouchingEndpointsOverlap) {
  EXPECT_TRUE(overlaps(1.0, 2.0, 2.0, 3.0));
  EXPECT_FALSE(overlaps(1.0, 2.0, 2.0001, 3.0));
  EXPECT_EQ(score_localization(std::vector{det(2.0, 2.0)}, std::vector{ann(1.0, 2.0)}).tp, 1u);
}

// One detection covering two annotations counts once as TP; both annotations
// are covered, so recall uses tp over tp + fn, not the covered count.
TEST(Score, OneDetectionManyAnnotations) {
  const auto m = score_localization(std::vector{det(0, 10)}, std::vector{ann(1, 2), ann(3, 4), ann(20, 21)});
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.covered, 2u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_DOUBLE_EQ(m.recall, 0.5);
}

TEST(Score, EmptyAnnotationsGiveVacuousRecall) {
  const auto none = score_localization(std::vector<DetectedError>{}, std::vector<TherapistAnnotation>{});
  EXPECT_EQ(none.precision, 1.0);
  EXPECT_EQ(none.recall, 1.0);
  EXPECT_TRUE(none.vacuous_recall);
  const auto fp_only = score_localization(std::vector{det(1, 2)}, std::vector<TherapistAnnotation>{});
  EXPECT_EQ(fp_only.precision, 0.0);
  EXPECT_EQ(fp_only.recall, 1.0);
  EXPECT_EQ(fp_only.f_score, 0.0);
}

TEST(Score, PerClassRecall) {
  const auto m = score_localization(
      std::vector{det(1, 2)},
      std::vector{ann(1, 2, ErrorClass::Prosodic), ann(5, 6, ErrorClass::Prosodic), ann(1.5, 1.6, ErrorClass::Repetition)});
  EXPECT_DOUBLE_EQ(m.per_class_recall.at(ErrorClass::Prosodic), 0.5);
  EXPECT_DOUBLE_EQ(m.per_class_recall.at(ErrorClass::Repetition), 1.0);
  EXPECT_FALSE(m.per_class_recall.count(ErrorClass::WordDeletion));
}

namespace {

struct Layout {
  std::vector<DetectedError> dets;
  std::vector<TherapistAnnotation> anns;
};

Layout random_layout(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(0, 12), cls(0, 7);
  // Times on a quarter-second grid are exact in binary, so touching endpoints
  // stay touching after a shift.
  std::uniform_int_distribution<int> tick(0, 400), len(0, 30);
  Layout l;
  for (int k = count(rng); k > 0; --k) {
    const double s = tick(rng) * 0.25;
    l.dets.push_back(det(s, s + len(rng) * 0.25));
  }
  for (int k = count(rng); k > 0; --k) {
    const double s = tick(rng) * 0.25;
    l.anns.push_back(ann(s, s + len(rng) * 0.25, kErrorClasses[static_cast<std::size_t>(cls(rng))]));
  }
  return l;
}

oracle::OverlapCounts brute(const Layout& l) {
  std::vector<oracle::Span> d, a;
  for (const auto& x : l.dets) d.push_back({x.start_s, x.end_s});
  for (const auto& x : l.anns) a.push_back({x.start_s, x.end_s});
  return oracle::overlap_counts(d, a);
}

}  // namespace

TEST(ScoreProperty, AgreesWithBruteForceAndIdentities) {
  std::mt19937 rng(41);
  for (int iter = 0; iter < 500; ++iter) {
    const auto l = random_layout(rng);
    const auto m = score_localization(l.dets, l.anns);
    const auto o = brute(l);
    EXPECT_EQ(m.tp, o.tp);
    EXPECT_EQ(m.fp, o.fp);
    EXPECT_EQ(m.fn, o.fn);
    EXPECT_EQ(m.covered, o.covered);
    EXPECT_DOUBLE_EQ(m.precision, o.precision);
    EXPECT_DOUBLE_EQ(m.recall, o.recall);
    EXPECT_DOUBLE_EQ(m.f_score, o.f);
    EXPECT_EQ(m.tp + m.fp, l.dets.size());
    for (const double v : {m.precision, m.recall, m.f_score}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    // Coverage recall, weighted by class size, equals covered / |annotations|.
    if (!l.anns.empty()) {
      double weighted = 0.0;
      for (const auto& [c, r] : m.per_class_recall) weighted += r * static_cast<double>(m.per_class_count.at(c));
      EXPECT_NEAR(weighted / static_cast<double>(l.anns.size()),
                  static_cast<double>(m.covered) / static_cast<double>(l.anns.size()), 1e-12);
    }
  }
}

TEST(ScoreProperty, TranslationInvariant) {
  std::mt19937 rng(43);
  for (int iter = 0; iter < 200; ++iter) {
    auto l = random_layout(rng);
    const auto before = score_localization(l.dets, l.anns);
    for (auto& d : l.dets) d.start_s += 3.5, d.end_s += 3.5;
    for (auto& a : l.anns) a.start_s += 3.5, a.end_s += 3.5;
    const auto after = score_localization(l.dets, l.anns);
    EXPECT_EQ(before.tp, after.tp);
    EXPECT_EQ(before.fp, after.fp);
    EXPECT_EQ(before.fn, after.fn);
    EXPECT_EQ(before.per_class_recall, after.per_class_recall);
  }
}
