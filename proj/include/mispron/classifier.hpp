#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mispron/alignment.hpp"
#include "mispron/annotation.hpp"
#include "mispron/error.hpp"
#include "mispron/lexicon.hpp"
#include "mispron/localizer.hpp"
#include "mispron/taxonomy.hpp"
#include "mispron/text.hpp"

namespace mispron {

/// Phoneme-level vs word-level cut: a pair is phoneme-level when the phoneme
/// edit distance is at most `abs` AND at most `rel` times the reference
/// word's phoneme count. Both bounds are inclusive.
struct Thresholds {
  unsigned abs = 3;
  double rel = 0.6;

  bool phoneme_level(std::size_t distance, std::size_t ref_len) const {
    return distance <= abs && static_cast<double>(distance) <= rel * static_cast<double>(ref_len) + 1e-9;
  }
};

namespace detail {

// Majority of S/D/I counts; ties go Substitute > Delete > Insert.
inline EditKind majority_kind(std::size_t subs, std::size_t dels, std::size_t ins) {
  if (subs >= dels && subs >= ins) return EditKind::Substitute;
  if (dels >= ins) return EditKind::Delete;
  return EditKind::Insert;
}

inline AsrErrorClass word_level(EditKind k) {
  switch (k) {
    case EditKind::Delete: return AsrErrorClass::WordDeletion;
    case EditKind::Insert: return AsrErrorClass::WordInsertion;
    default: return AsrErrorClass::WordSubstitution;
  }
}

inline AsrErrorClass phoneme_level(EditKind k) {
  switch (k) {
    case EditKind::Delete: return AsrErrorClass::PhonemeDeletion;
    case EditKind::Insert: return AsrErrorClass::PhonemeInsertion;
    default: return AsrErrorClass::PhonemeSubstitution;
  }
}

}  // namespace detail

/// Phoneme-level class for the pair, or nullopt when the thresholds send it
/// to word level.
inline std::optional<AsrErrorClass> classify_phonemes(std::span<const std::string> ref_phones,
                                                      std::span<const std::string> hyp_phones,
                                                      const Thresholds& thr = {}) {
  const auto script = align(ref_phones, hyp_phones);
  if (!thr.phoneme_level(script.distance, ref_phones.size())) return std::nullopt;
  return detail::phoneme_level(detail::majority_kind(script.count(EditKind::Substitute),
                                                     script.count(EditKind::Delete),
                                                     script.count(EditKind::Insert)));
}

/// Class of a substituted word pair.
inline AsrErrorClass classify_word_pair(std::string_view ref_word, std::string_view hyp_word, const Lexicon& lex,
                                        const Thresholds& thr = {}) {
  const auto ref = lex.phonemes_of(ref_word);
  const auto hyp = lex.phonemes_of(hyp_word);
  return classify_phonemes(ref.phones, hyp.phones, thr).value_or(AsrErrorClass::WordSubstitution);
}

inline AsrErrorClass classify_word_pair(const Token& ref_word, const Token& hyp_word, const Lexicon& lex,
                                        const Thresholds& thr = {}) {
  return classify_word_pair(ref_word.norm, hyp_word.norm, lex, thr);
}

/// Class of a whole detected region.
///
/// Single ops map directly (a lone Substitute goes through the phoneme
/// route). Multi-op regions take the word-level class of their majority op
/// kind, except that a region holding exactly one Substitute is first tried
/// on the phoneme route with the region's joined reference and hypothesis
/// text.
inline AsrErrorClass classify_detection(const DetectedError& det, const Lexicon& lex, const Thresholds& thr = {}) {
  if (det.ops.empty()) throw EmptyRun();
  std::size_t subs = 0, dels = 0, ins = 0;
  for (const auto& op : det.ops) {
    switch (op.kind) {
      case EditKind::Substitute: ++subs; break;
      case EditKind::Delete: ++dels; break;
      case EditKind::Insert: ++ins; break;
      case EditKind::Match: break;
    }
  }
  if (subs + dels + ins == 0) throw EmptyRun();
  if (det.ops.size() == 1) {
    if (subs == 1) return classify_word_pair(det.ref_text, det.hyp_text, lex, thr);
    return dels == 1 ? AsrErrorClass::WordDeletion : AsrErrorClass::WordInsertion;
  }
  if (subs == 1) {
    const auto ref = phonemes_of_phrase(det.ref_text, lex);
    const auto hyp = phonemes_of_phrase(det.hyp_text, lex);
    if (auto cls = classify_phonemes(ref, hyp, thr)) return *cls;
  }
  return detail::word_level(detail::majority_kind(subs, dels, ins));
}

/// Therapist class (rows) by ASR class plus Undetected (columns).
struct ConfusionMatrix {
  static constexpr std::size_t kRows = 8;
  static constexpr std::size_t kCols = 7;
  static constexpr std::size_t kUndetected = 6;

  std::array<std::array<std::size_t, kCols>, kRows> counts{};

  std::size_t& at(ErrorClass row, std::optional<AsrErrorClass> col) {
    return counts[index_of(row)][col ? index_of(*col) : kUndetected];
  }
  std::size_t at(ErrorClass row, std::optional<AsrErrorClass> col) const {
    return counts[index_of(row)][col ? index_of(*col) : kUndetected];
  }

  std::size_t row_total(std::size_t row) const {
    std::size_t n = 0;
    for (const auto c : counts[row]) n += c;
    return n;
  }

  std::size_t total() const {
    std::size_t n = 0;
    for (std::size_t r = 0; r < kRows; ++r) n += row_total(r);
    return n;
  }

  /// Cell as a percentage of its row total; 0 for an empty row.
  double row_pct(std::size_t row, std::size_t col) const {
    const auto n = row_total(row);
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(counts[row][col]) / static_cast<double>(n);
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    for (std::size_t r = 0; r < kRows; ++r)
      for (std::size_t c = 0; c < kCols; ++c) counts[r][c] += other.counts[r][c];
    return *this;
  }

  static std::string_view column_name(std::size_t col) {
    return col == kUndetected ? std::string_view("Undetected") : to_string(kAsrErrorClasses[col]);
  }
};

/// Index of the detection an annotation is credited to: the earliest-starting
/// overlapping detection, ties broken by longer overlap, then by position.
inline std::optional<std::size_t> assigned_detection(const TherapistAnnotation& ann,
                                                     std::span<const DetectedError> detections) {
  std::optional<std::size_t> best;
  double best_start = 0.0, best_overlap = 0.0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (!overlaps(d.start_s, d.end_s, ann.start_s, ann.end_s)) continue;
    const double ov = std::min(d.end_s, ann.end_s) - std::max(d.start_s, ann.start_s);
    if (!best || d.start_s < best_start || (d.start_s == best_start && ov > best_overlap)) {
      best = i;
      best_start = d.start_s;
      best_overlap = ov;
    }
  }
  return best;
}

inline ConfusionMatrix build_confusion(std::span<const TherapistAnnotation> annotations,
                                       std::span<const DetectedError> detections) {
  ConfusionMatrix cm;
  for (const auto& ann : annotations) {
    std::optional<AsrErrorClass> col;
    if (const auto i = assigned_detection(ann, detections)) {
      if (!detections[*i].asr_class) throw InputError("detection has not been classified");
      col = detections[*i].asr_class;
    }
    ++cm.at(ann.error_class, col);
  }
  return cm;
}

enum class MatchMode { Verbatim, PhoneticallySimilar, NoMatch };

inline constexpr std::string_view to_string(MatchMode m) {
  switch (m) {
    case MatchMode::Verbatim: return "Verbatim";
    case MatchMode::PhoneticallySimilar: return "PhoneticallySimilar";
    case MatchMode::NoMatch: return "NoMatch";
  }
  return "?";
}

struct ExactMatchResult {
  bool matched = false;
  MatchMode mode = MatchMode::NoMatch;
  double similarity = 1.0;  // normalized phoneme distance, 0 = identical
};

/// What the speaker actually said according to an exact-error description:
/// the right side of "X → Y" / "X -> Y", or the whole text when there is no
/// arrow. Returned in normalized form; throws when nothing is left.
inline std::string exact_error_target(std::string_view exact_error) {
  std::string_view target = exact_error;
  constexpr std::string_view kArrows[] = {"\xE2\x86\x92", "->", "=>"};
  for (const auto arrow : kArrows) {
    if (const auto pos = exact_error.rfind(arrow); pos != std::string_view::npos) {
      target = exact_error.substr(pos + arrow.size());
      break;
    }
  }
  std::string norm = normalize_phrase(target);
  if (norm.empty()) throw UnparseableExactError(std::string(exact_error));
  return norm;
}

/// Phoneme edit distance between two phrases divided by the longer phoneme
/// sequence; 0 when both are empty.
inline double normalized_phoneme_distance(std::string_view a, std::string_view b, const Lexicon& lex) {
  const auto pa = phonemes_of_phrase(a, lex);
  const auto pb = phonemes_of_phrase(b, lex);
  const auto longest = std::max(pa.size(), pb.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(edit_distance(pa, pb)) / static_cast<double>(longest);
}

inline ExactMatchResult exact_error_match(const TherapistAnnotation& ann, const DetectedError& det, const Lexicon& lex,
                                          double sim_threshold = 0.5) {
  const std::string target = exact_error_target(ann.exact_error);
  const std::string hyp = normalize_phrase(det.hyp_text);
  ExactMatchResult r;
  r.similarity = normalized_phoneme_distance(hyp, target, lex);
  if (hyp == target)
    r.mode = MatchMode::Verbatim;
  else if (r.similarity <= sim_threshold)
    r.mode = MatchMode::PhoneticallySimilar;
  else
    r.mode = MatchMode::NoMatch;
  r.matched = r.mode != MatchMode::NoMatch;
  return r;
}

}  // namespace mispron
