#pragma once

// Orchestration shared by the command-line tool and the integration tests:
// load every input up front, run the three stages per manifest entry, and
// render the report files in memory before anything touches the disk.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mispron/alignment.hpp"
#include "mispron/annotation.hpp"
#include "mispron/clarity.hpp"
#include "mispron/classifier.hpp"
#include "mispron/csv.hpp"
#include "mispron/error.hpp"
#include "mispron/lexicon.hpp"
#include "mispron/localizer.hpp"
#include "mispron/manifest.hpp"
#include "mispron/stats.hpp"
#include "mispron/transcript.hpp"

namespace mispron {

using ojson = nlohmann::ordered_json;

enum class Command { Clarity, Localize, Classify, Evaluate };

/// Immutable state shared by every entry of a run.
struct Session {
  RunManifest manifest;
  Lexicon lexicon;
  LabelOverrides overrides;
  std::vector<std::string> warnings;
};

inline Session open_session(RunManifest manifest) {
  Session s;
  validate(manifest.options);
  if (manifest.lexicon)
    s.lexicon = Lexicon::load(*manifest.lexicon);
  else
    s.warnings.emplace_back("no lexicon given: every word uses the letter fallback");
  if (manifest.override_labels) s.overrides = LabelOverrides::load(*manifest.override_labels);
  s.manifest = std::move(manifest);
  return s;
}

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads. Results keep index
/// order; if any call throws, the exception of the lowest index is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, unsigned jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct EntryData {
  const ManifestEntry* entry = nullptr;
  Transcript transcript;
  std::vector<Token> reference;
  std::vector<TimedWord> hyp;
  std::optional<std::vector<TherapistAnnotation>> annotations;
};

inline EntryData load_entry(const ManifestEntry& e, const LabelOverrides& overrides, bool need_annotations) {
  EntryData d;
  d.entry = &e;
  d.transcript = load_transcript(e.transcript);
  d.hyp = normalized_words(d.transcript);
  d.reference = load_reference(e.reference);
  if (d.reference.empty()) throw InputError(e.reference.string() + ": reference text has no words");
  if (need_annotations) {
    if (!e.annotations) throw InputError("entry \"" + e.id + "\" has no annotation file");
    try {
      d.annotations = map_annotations(parse_label_file(*e.annotations), overrides);
    } catch (const UnmappedLabel& u) {
      throw InputError(e.annotations->string() + ": unmapped label \"" + u.label() +
                       "\" (add it to the override file)");
    }
  }
  return d;
}

struct ExactMatchRow {
  std::size_t annotation = 0;
  std::size_t detection = 0;
  std::optional<std::string> target;  // nullopt when the label has no target
  std::optional<ExactMatchResult> result;
};

struct EntryAnalysis {
  EditScript script;
  ClarityReport clarity;
  std::size_t total_words = 0;
  std::optional<double> therapist_pct;
  std::vector<DetectedError> detections;  // classified
  std::vector<bool> detection_hit;         // overlaps an annotation
  std::optional<LocalizationMetrics> metrics;
  std::optional<ConfusionMatrix> confusion;
  std::vector<ExactMatchRow> exact;
};

inline EntryAnalysis analyze(const EntryData& d, const Session& s) {
  const auto& opt = s.manifest.options;
  EntryAnalysis a;
  a.script = align(d.reference, d.hyp, [](const Token& r, const TimedWord& h) { return r.norm == h.word; });
  verify_script(a.script, d.reference.size(), d.hyp.size());
  a.clarity = asr_clarity(a.script, d.reference.size());
  a.total_words = d.entry->total_words.value_or(d.reference.size());
  if (d.entry->words_in_error) a.therapist_pct = therapist_clarity(*d.entry->words_in_error, a.total_words);

  const auto runs = consecutive_error_runs(a.script);
  a.detections = timestamp_runs(runs, d.reference, d.hyp);
  for (auto& det : a.detections) {
    if (det.end_s < det.start_s) throw InvariantViolation("detection ends before it starts");
    det.asr_class = classify_detection(det, s.lexicon, opt.thresholds);
  }

  if (d.annotations) {
    const auto& anns = *d.annotations;
    a.metrics = score_localization(a.detections, anns);
    if (a.metrics->tp + a.metrics->fp != a.detections.size() || a.metrics->covered + a.metrics->fn != anns.size())
      throw InvariantViolation("localization counts do not add up");
    a.confusion = build_confusion(anns, a.detections);
    if (a.confusion->total() != anns.size()) throw InvariantViolation("confusion matrix loses annotations");
    a.detection_hit.resize(a.detections.size());
    for (std::size_t i = 0; i < anns.size(); ++i) {
      std::optional<std::string> target;
      try {
        target = exact_error_target(anns[i].exact_error);
      } catch (const UnparseableExactError&) {
      }
      for (std::size_t k = 0; k < a.detections.size(); ++k) {
        const auto& det = a.detections[k];
        if (!overlaps(det.start_s, det.end_s, anns[i].start_s, anns[i].end_s)) continue;
        a.detection_hit[k] = true;
        ExactMatchRow row{i, k, target, std::nullopt};
        if (target) row.result = exact_error_match(anns[i], det, s.lexicon, opt.sim_threshold);
        a.exact.push_back(std::move(row));
      }
    }
  }
  return a;
}

/// Rendered report files keyed by path relative to the output directory.
struct CommandResult {
  std::map<std::filesystem::path, std::string> files;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

inline ojson op_json(const EditOp& op) {
  ojson j;
  j["kind"] = to_string(op.kind);
  j["ref_index"] = op.ref_index ? ojson(*op.ref_index) : ojson(nullptr);
  j["hyp_index"] = op.hyp_index ? ojson(*op.hyp_index) : ojson(nullptr);
  return j;
}

inline std::string file_stem(std::string_view name) {
  std::string out;
  for (const char c : name) out += valid_id(std::string(1, c)) ? c : '_';
  return out.empty() ? "_" : out;
}

inline ojson number_or_null(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline double round1(double v) { return std::round(v * 10.0) / 10.0; }

inline std::string confusion_csv(const ConfusionMatrix& cm, bool percent) {
  std::vector<std::string> header{"therapist_class"};
  for (std::size_t c = 0; c < ConfusionMatrix::kCols; ++c) header.emplace_back(ConfusionMatrix::column_name(c));
  header.emplace_back("total");
  std::string out = csv::row(header);
  for (std::size_t r = 0; r < ConfusionMatrix::kRows; ++r) {
    std::vector<std::string> row{std::string(to_string(kErrorClasses[r]))};
    for (std::size_t c = 0; c < ConfusionMatrix::kCols; ++c)
      row.push_back(percent ? csv::number(cm.row_pct(r, c)) : csv::number(cm.counts[r][c]));
    row.push_back(csv::number(cm.row_total(r)));
    out += csv::row(row);
  }
  return out;
}

inline ojson confusion_json(const ConfusionMatrix& cm) {
  ojson j;
  j["columns"] = ojson::array();
  for (std::size_t c = 0; c < ConfusionMatrix::kCols; ++c) j["columns"].push_back(ConfusionMatrix::column_name(c));
  j["rows"] = ojson::array();
  for (std::size_t r = 0; r < ConfusionMatrix::kRows; ++r) {
    ojson row;
    row["therapist_class"] = to_string(kErrorClasses[r]);
    row["counts"] = cm.counts[r];
    row["total"] = cm.row_total(r);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

}  // namespace detail

inline CommandResult render_clarity(const std::vector<EntryData>& data, const std::vector<EntryAnalysis>& an) {
  CommandResult res;
  std::string summary = csv::row({"id", "speaker", "recording", "source", "substitutions", "deletions", "insertions",
                                  "ref_word_count", "wer", "clarity_asr", "clarity_pct", "severity",
                                  "therapist_clarity_pct", "therapist_severity"});
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = *data[i].entry;
    const auto& c = an[i].clarity;
    ojson j;
    j["id"] = e.id;
    j["speaker"] = e.speaker;
    j["recording"] = e.recording;
    j["source"] = data[i].transcript.source;
    j["audio_id"] = data[i].transcript.audio_id;
    j["substitutions"] = c.substitutions;
    j["deletions"] = c.deletions;
    j["insertions"] = c.insertions;
    j["ref_word_count"] = c.ref_word_count;
    j["wer"] = c.wer;
    j["clarity_asr"] = c.clarity_asr;
    j["clarity_pct"] = c.clarity_pct;
    j["severity"] = to_string(c.severity);
    if (an[i].therapist_pct) {
      const double pct = *an[i].therapist_pct;
      j["therapist"] = {{"words_in_error", *e.words_in_error},
                        {"total_words", an[i].total_words},
                        {"clarity_pct", pct},
                        {"clarity_pct_rounded", detail::round1(pct)},
                        {"severity", to_string(severity_of(pct))}};
    } else {
      j["therapist"] = nullptr;
    }
    res.files["clarity/" + e.id + ".json"] = detail::dump(j);
    summary += csv::row({e.id, e.speaker, e.recording, data[i].transcript.source, csv::number(c.substitutions),
                         csv::number(c.deletions), csv::number(c.insertions), csv::number(c.ref_word_count),
                         csv::number(c.wer), csv::number(c.clarity_asr), csv::number(c.clarity_pct),
                         std::string(to_string(c.severity)),
                         an[i].therapist_pct ? csv::number(detail::round1(*an[i].therapist_pct)) : "",
                         an[i].therapist_pct ? std::string(to_string(severity_of(*an[i].therapist_pct))) : ""});
  }
  res.files["clarity/summary.csv"] = summary;
  return res;
}

inline CommandResult render_localize(const std::vector<EntryData>& data, const std::vector<EntryAnalysis>& an) {
  CommandResult res;
  std::vector<std::string> header{"id", "source", "detections", "annotations", "tp", "fp", "fn",
                                  "precision", "recall", "f_score"};
  for (const auto c : kErrorClasses) header.push_back("recall_" + std::string(to_string(c)));
  std::string table = csv::row(header);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = *data[i].entry;
    const auto& a = an[i];
    const auto& m = *a.metrics;
    const std::string& source = data[i].transcript.source;

    ojson dets;
    dets["id"] = e.id;
    dets["source"] = source;
    dets["detections"] = ojson::array();
    std::string det_csv = csv::row({"start", "end", "status", "asr_class", "ref_text", "hyp_text"});
    for (std::size_t k = 0; k < a.detections.size(); ++k) {
      const auto& d = a.detections[k];
      ojson dj;
      dj["start"] = d.start_s;
      dj["end"] = d.end_s;
      dj["status"] = a.detection_hit[k] ? "TP" : "FP";
      dj["asr_class"] = to_string(*d.asr_class);
      dj["ref_text"] = d.ref_text;
      dj["hyp_text"] = d.hyp_text;
      dj["ref_range"] = {d.ref_begin, d.ref_end};
      dj["hyp_range"] = {d.hyp_begin, d.hyp_end};
      dj["ops"] = ojson::array();
      for (const auto& op : d.ops) dj["ops"].push_back(detail::op_json(op));
      dets["detections"].push_back(std::move(dj));
      det_csv += csv::row({csv::number(d.start_s), csv::number(d.end_s), a.detection_hit[k] ? "TP" : "FP",
                           std::string(to_string(*d.asr_class)), d.ref_text, d.hyp_text});
    }

    ojson mj;
    mj["id"] = e.id;
    mj["source"] = source;
    mj["detections"] = a.detections.size();
    mj["annotations"] = data[i].annotations->size();
    mj["tp"] = m.tp;
    mj["fp"] = m.fp;
    mj["fn"] = m.fn;
    mj["covered"] = m.covered;
    mj["precision"] = m.precision;
    mj["recall"] = m.recall;
    mj["f_score"] = m.f_score;
    mj["recall_vacuous"] = m.vacuous_recall;
    mj["per_class"] = ojson::object();
    for (const auto& [cls, r] : m.per_class_recall)
      mj["per_class"][std::string(to_string(cls))] = {{"annotations", m.per_class_count.at(cls)}, {"recall", r}};
    mj["warnings"] = ojson::array();
    if (m.vacuous_recall) {
      mj["warnings"].push_back("no annotations: recall reported as 1.0 by convention");
      res.warnings.push_back(e.id + ": no annotations, recall reported as 1.0");
    }

    res.files["localize/" + e.id + ".detections.json"] = detail::dump(dets);
    res.files["localize/" + e.id + ".detections.csv"] = det_csv;
    res.files["localize/" + e.id + ".metrics.json"] = detail::dump(mj);

    std::vector<std::string> row{e.id, source, csv::number(a.detections.size()),
                                 csv::number(data[i].annotations->size()), csv::number(m.tp), csv::number(m.fp),
                                 csv::number(m.fn), csv::number(m.precision), csv::number(m.recall),
                                 csv::number(m.f_score)};
    for (const auto c : kErrorClasses) {
      const auto it = m.per_class_recall.find(c);
      row.push_back(it == m.per_class_recall.end() ? "" : csv::number(it->second));
    }
    table += csv::row(row);
  }
  res.files["localize/metrics.csv"] = table;
  return res;
}

inline CommandResult render_classify(const std::vector<EntryData>& data, const std::vector<EntryAnalysis>& an) {
  CommandResult res;
  std::map<std::string, ConfusionMatrix> pooled;
  ojson summary;
  summary["entries"] = ojson::array();

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = *data[i].entry;
    const auto& a = an[i];
    const auto& anns = *data[i].annotations;
    const std::string& source = data[i].transcript.source;
    pooled[source] += *a.confusion;
    res.files["classify/" + e.id + ".confusion_counts.csv"] = detail::confusion_csv(*a.confusion, false);
    res.files["classify/" + e.id + ".confusion_pct.csv"] = detail::confusion_csv(*a.confusion, true);

    std::string ex = csv::row({"annotation_start", "annotation_end", "error_class", "exact_error", "target",
                               "detection_start", "detection_end", "asr_class", "hyp_text", "matched", "mode",
                               "similarity"});
    // Per annotation: evaluated if it has a target and at least one overlapping detection.
    std::vector<int> verdict(anns.size(), -1);
    for (const auto& row : a.exact) {
      const auto& ann = anns[row.annotation];
      const auto& det = a.detections[row.detection];
      const bool matched = row.result && row.result->matched;
      if (row.result) verdict[row.annotation] = std::max(verdict[row.annotation], matched ? 1 : 0);
      ex += csv::row({csv::number(ann.start_s), csv::number(ann.end_s), std::string(to_string(ann.error_class)),
                      ann.exact_error, row.target.value_or(""), csv::number(det.start_s), csv::number(det.end_s),
                      std::string(to_string(*det.asr_class)), det.hyp_text, matched ? "true" : "false",
                      row.result ? std::string(to_string(row.result->mode)) : "Unparseable",
                      row.result ? csv::number(row.result->similarity) : ""});
    }
    res.files["classify/" + e.id + ".exact_match.csv"] = ex;

    std::size_t evaluated = 0, matched = 0;
    for (const int v : verdict) {
      evaluated += v >= 0;
      matched += v == 1;
    }
    ojson ej;
    ej["id"] = e.id;
    ej["source"] = source;
    ej["annotations"] = anns.size();
    ej["detections"] = a.detections.size();
    ej["overlapping_pairs"] = a.exact.size();
    ej["exact_match"] = {{"evaluated", evaluated},
                         {"matched", matched},
                         {"rate", evaluated ? ojson(static_cast<double>(matched) / static_cast<double>(evaluated))
                                            : ojson(nullptr)}};
    ej["confusion"] = detail::confusion_json(*a.confusion);
    summary["entries"].push_back(std::move(ej));
  }

  summary["sources"] = ojson::array();
  for (const auto& [source, cm] : pooled) {
    const std::string stem = "classify/source-" + detail::file_stem(source);
    res.files[stem + ".confusion_counts.csv"] = detail::confusion_csv(cm, false);
    res.files[stem + ".confusion_pct.csv"] = detail::confusion_csv(cm, true);
    summary["sources"].push_back({{"source", source}, {"confusion", detail::confusion_json(cm)}});
  }
  res.files["classify/summary.json"] = detail::dump(summary);
  return res;
}

inline CommandResult render_evaluate(const Session& s, const std::vector<EntryData>& data,
                                     const std::vector<EntryAnalysis>& an) {
  struct Group {
    std::size_t errors = 0, ref_words = 0, in_error = 0, total = 0;
  };
  const Grouping grouping = s.manifest.options.grouping;
  std::map<std::string, std::map<std::string, Group>> by_source;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = *data[i].entry;
    if (!e.words_in_error) throw InputError("entry \"" + e.id + "\" lacks words_in_error (therapist count)");
    auto& g = by_source[data[i].transcript.source][grouping == Grouping::Speaker ? e.speaker : e.recording];
    g.errors += an[i].clarity.errors();
    g.ref_words += an[i].clarity.ref_word_count;
    g.in_error += *e.words_in_error;
    g.total += an[i].total_words;
  }

  CommandResult res;
  std::string scores = csv::row({"source", "group", "asr_clarity", "therapist_clarity", "severity", "severity_level"});
  std::string aggregate =
      csv::row({"source", "n", "pearson_vs_severity", "pearson_vs_therapist", "norm_euclidean_vs_therapist"});
  std::string long_csv = csv::row({"source", "metric", "value"});
  ojson summary;
  summary["grouping"] = to_string(grouping);
  summary["sources"] = ojson::array();
  summary["warnings"] = ojson::array();

  for (const auto& [source, groups] : by_source) {
    if (groups.size() < 2)
      throw InputError("source \"" + source + "\": correlation needs at least 2 " + std::string(to_string(grouping)) +
                       "s, got " + std::to_string(groups.size()));
    ScoreVector asr, therapist, severity;
    for (const auto& [label, g] : groups) {
      const double asr_frac = std::clamp(1.0 - static_cast<double>(g.errors) / static_cast<double>(g.ref_words), 0.0, 1.0);
      const double ther_pct = therapist_clarity(g.in_error, g.total);
      const Severity sev = severity_of(ther_pct);
      for (auto* v : {&asr, &therapist, &severity}) v->labels.push_back(label);
      asr.values.push_back(asr_frac);
      therapist.values.push_back(ther_pct / 100.0);
      severity.values.push_back(ordinal(sev));
      scores += csv::row({source, label, csv::number(asr_frac), csv::number(ther_pct / 100.0),
                          std::string(to_string(sev)), std::to_string(ordinal(sev))});
    }

    ojson sj;
    sj["source"] = source;
    sj["n"] = groups.size();
    sj["warnings"] = ojson::array();
    auto correlate = [&](const ScoreVector& other, const char* metric) -> std::optional<double> {
      try {
        return pearson(asr, other);
      } catch (const ZeroVariance&) {
        const std::string w = std::string(metric) + ": zero variance, correlation undefined";
        sj["warnings"].push_back(w);
        summary["warnings"].push_back(source + ": " + w);
        res.warnings.push_back(source + ": " + w);
        return std::nullopt;
      }
    };
    const auto vs_sev = correlate(severity, "pearson_vs_severity");
    const auto vs_ther = correlate(therapist, "pearson_vs_therapist");
    const double dist = normalized_euclidean(asr, therapist);
    sj["pearson_vs_severity"] = detail::number_or_null(vs_sev);
    sj["pearson_vs_therapist"] = detail::number_or_null(vs_ther);
    sj["norm_euclidean_vs_therapist"] = dist;
    summary["sources"].push_back(std::move(sj));

    auto cell = [](const std::optional<double>& v) { return v ? csv::number(*v) : std::string(); };
    aggregate += csv::row({source, csv::number(groups.size()), cell(vs_sev), cell(vs_ther), csv::number(dist)});
    long_csv += csv::row({source, "pearson_vs_severity", cell(vs_sev)});
    long_csv += csv::row({source, "pearson_vs_therapist", cell(vs_ther)});
    long_csv += csv::row({source, "norm_euclidean_vs_therapist", csv::number(dist)});
  }
  res.files["evaluate/scores.csv"] = scores;
  res.files["evaluate/aggregate.csv"] = aggregate;
  res.files["evaluate/long.csv"] = long_csv;
  res.files["evaluate/summary.json"] = detail::dump(summary);
  return res;
}

/// Loads, analyzes and renders one command. Throws InputError before any
/// output exists when an input is bad.
inline CommandResult run_command(Command cmd, const Session& s) {
  const auto& entries = s.manifest.speakers;
  if (entries.empty()) throw InputError("manifest lists no speakers");
  const bool need_ann = cmd == Command::Localize || cmd == Command::Classify;
  const unsigned jobs = s.manifest.options.jobs;
  const auto data = parallel_map(entries.size(), jobs,
                                 [&](std::size_t i) { return load_entry(entries[i], s.overrides, need_ann); });
  const auto an = parallel_map(entries.size(), jobs, [&](std::size_t i) { return analyze(data[i], s); });

  CommandResult res;
  switch (cmd) {
    case Command::Clarity: res = render_clarity(data, an); break;
    case Command::Localize: res = render_localize(data, an); break;
    case Command::Classify: res = render_classify(data, an); break;
    case Command::Evaluate: res = render_evaluate(s, data, an); break;
  }
  res.warnings.insert(res.warnings.begin(), s.warnings.begin(), s.warnings.end());
  return res;
}

/// Writes every rendered file under `out_dir`, creating directories.
inline void write_outputs(const std::filesystem::path& out_dir, const CommandResult& res) {
  for (const auto& [rel, content] : res.files) {
    const auto path = out_dir / rel;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + path.string());
  }
}

}  // namespace mispron
