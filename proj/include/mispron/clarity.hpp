#pragma once

#include <algorithm>
#include <cstddef>

#include "mispron/alignment.hpp"
#include "mispron/error.hpp"
#include "mispron/taxonomy.hpp"

namespace mispron {

/// Severity from a clarity percentage: Mild from 80 up, Moderate from 50, else Severe.
inline constexpr Severity severity_of(double clarity_pct) {
  if (clarity_pct >= 80.0) return Severity::Mild;
  if (clarity_pct >= 50.0) return Severity::Moderate;
  return Severity::Severe;
}

struct ClarityReport {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_word_count = 0;
  double wer = 0.0;
  double clarity_asr = 1.0;  // 1 - wer, unclamped
  double clarity_pct = 100.0;  // clamped to [0, 100], drives severity
  Severity severity = Severity::Mild;

  std::size_t errors() const noexcept { return substitutions + deletions + insertions; }
};

/// Stage-one score from a word-level script over the full passage.
inline ClarityReport asr_clarity(const EditScript& script, std::size_t ref_word_count) {
  if (ref_word_count == 0) throw ZeroReference();
  ClarityReport r;
  r.substitutions = script.count(EditKind::Substitute);
  r.deletions = script.count(EditKind::Delete);
  r.insertions = script.count(EditKind::Insert);
  r.ref_word_count = ref_word_count;
  r.wer = static_cast<double>(r.errors()) / static_cast<double>(ref_word_count);
  r.clarity_asr = 1.0 - r.wer;
  r.clarity_pct = std::clamp(100.0 * r.clarity_asr, 0.0, 100.0);
  r.severity = severity_of(r.clarity_pct);
  return r;
}

/// Percentage of words the therapist did not mark as in error.
inline double therapist_clarity(std::size_t words_in_error, std::size_t total_words) {
  if (total_words == 0) throw ZeroReference();
  if (words_in_error > total_words) throw CountExceedsTotal(words_in_error, total_words);
  return 100.0 * (1.0 - static_cast<double>(words_in_error) / static_cast<double>(total_words));
}

}  // namespace mispron
