#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mispron/alignment.hpp"
#include "mispron/annotation.hpp"
#include "mispron/error.hpp"
#include "mispron/taxonomy.hpp"
#include "mispron/text.hpp"

namespace mispron {

/// Hypothesis word with its timestamps; `word` holds the normalized form.
struct TimedWord {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const TimedWord&) const = default;
};

struct DetectedError {
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<EditOp> ops;
  std::optional<AsrErrorClass> asr_class;
  std::string ref_text;
  std::string hyp_text;
  // Half-open index ranges into the reference and hypothesis sequences.
  std::size_t ref_begin = 0, ref_end = 0, hyp_begin = 0, hyp_end = 0;
};

/// Closed-interval overlap: touching endpoints count.
inline constexpr bool overlaps(double a_start, double a_end, double b_start, double b_end) {
  return a_start <= b_end && b_start <= a_end;
}

/// Turns error runs into timed detections.
///
/// A run with hypothesis words spans their earliest start to latest end. A
/// run with none (pure deletion) takes the gap between the neighbouring
/// hypothesis words; at either edge of the transcript it collapses to a
/// zero-length span on the one neighbour's boundary, and to [0, 0] when the
/// transcript is empty.
inline std::vector<DetectedError> timestamp_runs(std::span<const ErrorRun> runs, std::span<const Token> ref,
                                                 std::span<const TimedWord> hyp) {
  std::vector<DetectedError> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    if (run.ops.empty()) throw EmptyRun();
    if (run.ref_end > ref.size() || run.hyp_end > hyp.size() || run.ref_begin > run.ref_end ||
        run.hyp_begin > run.hyp_end)
      throw IndexOutOfRange("error run indexes past the end of its sequences");
    DetectedError det;
    det.ops = run.ops;
    det.ref_begin = run.ref_begin;
    det.ref_end = run.ref_end;
    det.hyp_begin = run.hyp_begin;
    det.hyp_end = run.hyp_end;
    for (std::size_t i = run.ref_begin; i < run.ref_end; ++i) {
      if (!det.ref_text.empty()) det.ref_text += ' ';
      det.ref_text += ref[i].norm;
    }
    for (std::size_t j = run.hyp_begin; j < run.hyp_end; ++j) {
      if (!det.hyp_text.empty()) det.hyp_text += ' ';
      det.hyp_text += hyp[j].word;
    }
    if (run.has_hyp()) {
      det.start_s = hyp[run.hyp_begin].start_s;
      det.end_s = hyp[run.hyp_begin].end_s;
      for (std::size_t j = run.hyp_begin; j < run.hyp_end; ++j) {
        det.start_s = std::min(det.start_s, hyp[j].start_s);
        det.end_s = std::max(det.end_s, hyp[j].end_s);
      }
    } else {
      const std::size_t p = run.hyp_begin;
      const bool has_prev = p > 0, has_next = p < hyp.size();
      if (has_prev && has_next) {
        det.start_s = hyp[p - 1].end_s;
        det.end_s = std::max(det.start_s, hyp[p].start_s);
      } else if (has_next) {
        det.start_s = det.end_s = hyp[p].start_s;
      } else if (has_prev) {
        det.start_s = det.end_s = hyp[p - 1].end_s;
      }
    }
    out.push_back(std::move(det));
  }
  return out;
}

struct LocalizationMetrics {
  std::size_t tp = 0, fp = 0, fn = 0;
  std::size_t covered = 0;  // annotations overlapped by at least one detection
  double precision = 0.0, recall = 0.0, f_score = 0.0;
  std::map<ErrorClass, double> per_class_recall;  // classes with >= 1 annotation
  std::map<ErrorClass, std::size_t> per_class_count;
  bool vacuous_recall = false;  // no annotations: recall reported as 1
};

namespace detail {

// Answers "does [s, e] touch any stored interval" in O(log n): among intervals
// whose start is <= e, the largest end must reach s.
class IntervalProbe {
public:
  template <class Range, class StartFn, class EndFn>
  IntervalProbe(const Range& items, StartFn start, EndFn end) {
    std::vector<std::pair<double, double>> iv;
    iv.reserve(std::size(items));
    for (const auto& x : items) iv.emplace_back(start(x), end(x));
    std::ranges::sort(iv);
    starts_.reserve(iv.size());
    max_end_.reserve(iv.size());
    for (const auto& [s, e] : iv) {
      starts_.push_back(s);
      max_end_.push_back(max_end_.empty() ? e : std::max(max_end_.back(), e));
    }
  }

  bool touches(double s, double e) const {
    const auto k = static_cast<std::size_t>(std::ranges::upper_bound(starts_, e) - starts_.begin());
    return k > 0 && max_end_[k - 1] >= s;
  }

private:
  std::vector<double> starts_;
  std::vector<double> max_end_;
};

}  // namespace detail

/// Detection-side TP/FP and annotation-side FN, per the overlap rule above.
inline LocalizationMetrics score_localization(std::span<const DetectedError> detections,
                                              std::span<const TherapistAnnotation> annotations) {
  const detail::IntervalProbe ann_probe(annotations, [](const auto& a) { return a.start_s; },
                                        [](const auto& a) { return a.end_s; });
  const detail::IntervalProbe det_probe(detections, [](const auto& d) { return d.start_s; },
                                        [](const auto& d) { return d.end_s; });
  LocalizationMetrics m;
  for (const auto& d : detections) (ann_probe.touches(d.start_s, d.end_s) ? m.tp : m.fp)++;

  std::map<ErrorClass, std::size_t> covered_by_class;
  for (const auto& a : annotations) {
    ++m.per_class_count[a.error_class];
    if (det_probe.touches(a.start_s, a.end_s)) {
      ++m.covered;
      ++covered_by_class[a.error_class];
    }
  }
  m.fn = annotations.size() - m.covered;
  for (const auto& [cls, n] : m.per_class_count)
    m.per_class_recall[cls] = static_cast<double>(covered_by_class[cls]) / static_cast<double>(n);

  if (m.tp + m.fp > 0)
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  else
    m.precision = annotations.empty() ? 1.0 : 0.0;
  if (m.tp + m.fn > 0) {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  } else {
    m.recall = 1.0;
    m.vacuous_recall = true;
  }
  m.f_score = (m.precision > 0.0 && m.recall > 0.0) ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace mispron
