#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mispron/csv.hpp"
#include "mispron/error.hpp"
#include "mispron/taxonomy.hpp"
#include "mispron/text.hpp"

namespace mispron {

/// One region of an Audacity label track, before class mapping.
struct LabelRegion {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string raw_label;

  bool operator==(const LabelRegion&) const = default;
};

struct TherapistAnnotation {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string raw_label;
  ErrorClass error_class = ErrorClass::WordSubstitution;
  std::string exact_error;

  bool operator==(const TherapistAnnotation&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s, std::string_view chars = " \t\r\n") {
  const auto b = s.find_first_not_of(chars);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(chars);
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_seconds(std::string_view field) {
  field = trim(field, " ");
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Reads `start<TAB>end<TAB>label` lines. Blank lines and Audacity
/// spectral-selection lines (leading backslash) are skipped. The result is
/// stably sorted by start time.
inline std::vector<LabelRegion> parse_labels(std::istream& in, const std::string& source_name = "<labels>") {
  std::vector<LabelRegion> regions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line.front() == '\\') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw MalformedLabelLine(source_name, line_no, "expected start<TAB>end<TAB>label");
    const auto start = detail::parse_seconds(std::string_view(line).substr(0, tab1));
    const auto end = detail::parse_seconds(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
    if (!start || !end) throw MalformedLabelLine(source_name, line_no, "non-numeric time");
    if (*start < 0.0) throw MalformedLabelLine(source_name, line_no, "negative start time");
    if (*end < *start) throw NegativeDuration(source_name, line_no);
    regions.push_back(LabelRegion{*start, *end, line.substr(tab2 + 1)});
  }
  std::ranges::stable_sort(regions, {}, &LabelRegion::start_s);
  return regions;
}

inline std::vector<LabelRegion> parse_label_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open label file: " + path.string());
  return parse_labels(in, path.string());
}

/// Inverse of parse_labels: times at millisecond precision, labels verbatim.
inline void write_labels(std::ostream& out, const std::vector<LabelRegion>& regions) {
  char buf[64];
  for (const auto& r : regions) {
    std::snprintf(buf, sizeof buf, "%.3f\t%.3f\t", r.start_s, r.end_s);
    out << buf << r.raw_label << '\n';
  }
}

struct KeywordRule {
  std::string_view phrase;
  ErrorClass error_class;
};

/// Label type phrases, matched case-insensitively as a prefix of the label
/// at a word boundary. The longest matching phrase wins.
inline constexpr std::array kLabelKeywords = {
    KeywordRule{"word replacement", ErrorClass::WordSubstitution},
    KeywordRule{"word replaced", ErrorClass::WordSubstitution},
    KeywordRule{"word substitution", ErrorClass::WordSubstitution},
    KeywordRule{"word substituted", ErrorClass::WordSubstitution},
    KeywordRule{"sound substitution", ErrorClass::PhonemeSubstitution},
    KeywordRule{"sound replacement", ErrorClass::PhonemeSubstitution},
    KeywordRule{"phoneme substitution", ErrorClass::PhonemeSubstitution},
    KeywordRule{"phoneme replacement", ErrorClass::PhonemeSubstitution},
    KeywordRule{"phone substitution", ErrorClass::PhonemeSubstitution},
    KeywordRule{"word deletion", ErrorClass::WordDeletion},
    KeywordRule{"word omission", ErrorClass::WordDeletion},
    KeywordRule{"word omitted", ErrorClass::WordDeletion},
    KeywordRule{"omitted word", ErrorClass::WordDeletion},
    KeywordRule{"sound deletion", ErrorClass::PhonemeDeletion},
    KeywordRule{"sound omission", ErrorClass::PhonemeDeletion},
    KeywordRule{"phoneme deletion", ErrorClass::PhonemeDeletion},
    KeywordRule{"phoneme omission", ErrorClass::PhonemeDeletion},
    KeywordRule{"phone deletion", ErrorClass::PhonemeDeletion},
    KeywordRule{"word insertion", ErrorClass::WordInsertion},
    KeywordRule{"word addition", ErrorClass::WordInsertion},
    KeywordRule{"added word", ErrorClass::WordInsertion},
    KeywordRule{"sound insertion", ErrorClass::PhonemeInsertion},
    KeywordRule{"sound addition", ErrorClass::PhonemeInsertion},
    KeywordRule{"added sound", ErrorClass::PhonemeInsertion},
    KeywordRule{"phoneme insertion", ErrorClass::PhonemeInsertion},
    KeywordRule{"phone insertion", ErrorClass::PhonemeInsertion},
    KeywordRule{"repetition", ErrorClass::Repetition},
    KeywordRule{"word repetition", ErrorClass::Repetition},
    KeywordRule{"sound repetition", ErrorClass::Repetition},
    KeywordRule{"phoneme repetition", ErrorClass::Repetition},
    KeywordRule{"repeated", ErrorClass::Repetition},
    KeywordRule{"prolonged pause", ErrorClass::Prosodic},
    KeywordRule{"prolonged pauses", ErrorClass::Prosodic},
    KeywordRule{"irregular pause", ErrorClass::Prosodic},
    KeywordRule{"irregular pauses", ErrorClass::Prosodic},
    KeywordRule{"long pause", ErrorClass::Prosodic},
    KeywordRule{"pause", ErrorClass::Prosodic},
    KeywordRule{"prolonged", ErrorClass::Prosodic},
    KeywordRule{"strained voice", ErrorClass::Prosodic},
    KeywordRule{"strained", ErrorClass::Prosodic},
    KeywordRule{"prosodic", ErrorClass::Prosodic},
    KeywordRule{"prosody", ErrorClass::Prosodic},
};

struct MappedLabel {
  ErrorClass error_class;
  std::string exact_error;

  bool operator==(const MappedLabel&) const = default;
};

/// Keyword-table lookup; nullopt when no phrase matches.
inline std::optional<MappedLabel> match_label_keyword(std::string_view raw_label) {
  const std::string folded = fold_to_ascii(detail::trim(raw_label));
  const KeywordRule* best = nullptr;
  for (const auto& rule : kLabelKeywords) {
    const auto& p = rule.phrase;
    if (folded.size() < p.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < p.size() && same; ++i)
      same = std::tolower(static_cast<unsigned char>(folded[i])) == p[i];
    if (!same) continue;
    if (folded.size() > p.size() && std::isalnum(static_cast<unsigned char>(folded[p.size()]))) continue;
    if (!best || p.size() > best->phrase.size()) best = &rule;
  }
  if (!best) return std::nullopt;
  const auto rest = detail::trim(std::string_view(folded).substr(best->phrase.size()), " \t:;,");
  return MappedLabel{best->error_class, std::string(rest)};
}

/// Keyword-table mapping; throws UnmappedLabel when nothing matches.
inline MappedLabel map_label(std::string_view raw_label) {
  if (auto m = match_label_keyword(raw_label)) return *m;
  throw UnmappedLabel(std::string(raw_label));
}

/// Manual label resolutions read from `raw_label,error_class[,exact_error]`
/// CSV. An override always beats the keyword table.
class LabelOverrides {
public:
  struct Entry {
    ErrorClass error_class;
    std::optional<std::string> exact_error;
  };

  static LabelOverrides parse(std::istream& in, const std::string& source_name = "<overrides>") {
    LabelOverrides out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool has_exact = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (detail::trim(line).empty()) continue;
      const auto fields = csv::split(line);
      if (!fields) throw MalformedOverrideLine(source_name, line_no, "unterminated quote");
      if (!header_seen) {
        if (fields->size() < 2 || detail::trim((*fields)[0]) != "raw_label" ||
            detail::trim((*fields)[1]) != "error_class")
          throw MalformedOverrideLine(source_name, line_no, "header must be raw_label,error_class");
        has_exact = fields->size() >= 3 && detail::trim((*fields)[2]) == "exact_error";
        header_seen = true;
        continue;
      }
      if (fields->size() < 2) throw MalformedOverrideLine(source_name, line_no, "expected 2 fields");
      const auto cls = error_class_from_string(detail::trim((*fields)[1]));
      if (!cls) throw MalformedOverrideLine(source_name, line_no, "unknown class \"" + (*fields)[1] + "\"");
      Entry e{*cls, std::nullopt};
      if (has_exact && fields->size() >= 3) e.exact_error = std::string(detail::trim((*fields)[2]));
      out.entries_.insert_or_assign(std::string(detail::trim((*fields)[0])), std::move(e));
    }
    return out;
  }

  static LabelOverrides load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open override file: " + path.string());
    return parse(in, path.string());
  }

  const Entry* find(std::string_view raw_label) const {
    const auto it = entries_.find(std::string(detail::trim(raw_label)));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return entries_.size(); }

private:
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Override first, then the keyword table. When an override has no
/// exact_error column the keyword remainder (if any) is used.
inline MappedLabel map_label(std::string_view raw_label, const LabelOverrides& overrides) {
  if (const auto* e = overrides.find(raw_label)) {
    if (e->exact_error) return MappedLabel{e->error_class, *e->exact_error};
    const auto kw = match_label_keyword(raw_label);
    return MappedLabel{e->error_class, kw ? kw->exact_error : std::string{}};
  }
  return map_label(raw_label);
}

inline std::vector<TherapistAnnotation> map_annotations(const std::vector<LabelRegion>& regions,
                                                        const LabelOverrides& overrides = {}) {
  std::vector<TherapistAnnotation> out;
  out.reserve(regions.size());
  for (const auto& r : regions) {
    auto m = map_label(r.raw_label, overrides);
    out.push_back(TherapistAnnotation{r.start_s, r.end_s, r.raw_label, m.error_class, std::move(m.exact_error)});
  }
  return out;
}

}  // namespace mispron
