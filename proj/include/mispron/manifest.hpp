#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mispron/classifier.hpp"
#include "mispron/error.hpp"

namespace mispron {

enum class Grouping { Speaker, Recording };

inline std::string_view to_string(Grouping g) { return g == Grouping::Speaker ? "speaker" : "recording"; }

inline std::optional<Grouping> grouping_from_string(std::string_view s) {
  if (s == "speaker") return Grouping::Speaker;
  if (s == "recording") return Grouping::Recording;
  return std::nullopt;
}

/// One transcript to assess. `speaker` and `recording` default to `id`; they
/// key the cross-speaker aggregation and let several ASR sources share a
/// recording.
struct ManifestEntry {
  std::string id;
  std::string speaker;
  std::string recording;
  std::filesystem::path transcript;
  std::filesystem::path reference;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::size_t> words_in_error;
  std::optional<std::size_t> total_words;  // defaults to the reference token count
};

struct RunOptions {
  double sim_threshold = 0.5;
  Thresholds thresholds{};
  Grouping grouping = Grouping::Speaker;
  unsigned jobs = 1;
};

struct RunManifest {
  std::vector<ManifestEntry> speakers;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> override_labels;
  RunOptions options;
};

inline bool valid_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (const char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

inline void validate(const RunOptions& o) {
  if (o.thresholds.abs == 0) throw InputError("abs-threshold must be positive");
  if (!(o.thresholds.rel > 0.0)) throw InputError("rel-threshold must be positive");
  if (!(o.sim_threshold >= 0.0) || o.sim_threshold > 1.0) throw InputError("sim-threshold must lie in [0, 1]");
  if (o.jobs == 0) throw InputError("jobs must be at least 1");
}

/// Relative paths resolve against `base`.
inline RunManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base,
                                  const std::string& source_name = "<manifest>") {
  auto fail = [&](const std::string& what) { return InputError(source_name + ": " + what); };
  auto path_of = [&](const nlohmann::json& v, const std::string& what) {
    if (!v.is_string() || v.get<std::string>().empty()) throw fail(what + " must be a non-empty string");
    std::filesystem::path p = v.get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  auto count_of = [&](const nlohmann::json& v, const std::string& what) -> std::size_t {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw fail(what + " must be a non-negative integer");
    return v.get<std::size_t>();
  };

  if (!j.is_object()) throw fail("manifest must be a JSON object");
  RunManifest m;
  if (j.contains("lexicon") && !j["lexicon"].is_null()) m.lexicon = path_of(j["lexicon"], "lexicon");
  if (j.contains("override_labels") && !j["override_labels"].is_null())
    m.override_labels = path_of(j["override_labels"], "override_labels");
  if (j.contains("options")) {
    const auto& o = j["options"];
    if (!o.is_object()) throw fail("options must be an object");
    if (o.contains("sim_threshold")) m.options.sim_threshold = o["sim_threshold"].get<double>();
    if (o.contains("abs_threshold")) m.options.thresholds.abs = static_cast<unsigned>(count_of(o["abs_threshold"], "abs_threshold"));
    if (o.contains("rel_threshold")) m.options.thresholds.rel = o["rel_threshold"].get<double>();
    if (o.contains("grouping")) {
      const auto g = grouping_from_string(o["grouping"].get<std::string>());
      if (!g) throw fail("grouping must be \"speaker\" or \"recording\"");
      m.options.grouping = *g;
    }
  }
  if (!j.contains("speakers") || !j["speakers"].is_array()) throw fail("missing array field \"speakers\"");

  std::set<std::string> ids;
  std::set<std::filesystem::path> transcripts;
  std::size_t k = 0;
  for (const auto& s : j["speakers"]) {
    const std::string where = "speakers[" + std::to_string(k++) + "]";
    if (!s.is_object()) throw fail(where + " must be an object");
    if (!s.contains("id") || !s["id"].is_string() || !valid_id(s["id"].get<std::string>()))
      throw fail(where + ".id must match [A-Za-z0-9._-]+");
    ManifestEntry e;
    e.id = s["id"].get<std::string>();
    if (!ids.insert(e.id).second) throw fail(where + ": duplicate id \"" + e.id + "\"");
    e.speaker = s.contains("speaker") ? s["speaker"].get<std::string>() : e.id;
    e.recording = s.contains("recording") ? s["recording"].get<std::string>() : e.id;
    if (!s.contains("transcript")) throw fail(where + ": missing transcript");
    if (!s.contains("reference")) throw fail(where + ": missing reference");
    e.transcript = path_of(s["transcript"], where + ".transcript");
    e.reference = path_of(s["reference"], where + ".reference");
    if (s.contains("annotations") && !s["annotations"].is_null())
      e.annotations = path_of(s["annotations"], where + ".annotations");
    if (s.contains("words_in_error") && !s["words_in_error"].is_null())
      e.words_in_error = count_of(s["words_in_error"], where + ".words_in_error");
    if (s.contains("total_words") && !s["total_words"].is_null()) {
      e.total_words = count_of(s["total_words"], where + ".total_words");
      if (*e.total_words == 0) throw fail(where + ".total_words must be positive");
    }
    if (e.transcript == e.reference || (e.annotations && (*e.annotations == e.transcript || *e.annotations == e.reference)))
      throw fail(where + ": transcript, reference and annotation paths must differ");
    if (!transcripts.insert(e.transcript.lexically_normal()).second)
      throw fail(where + ": transcript already used by another entry");
    m.speakers.push_back(std::move(e));
  }
  validate(m.options);
  return m;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON at byte " + std::to_string(e.byte));
  }
  try {
    return parse_manifest(j, path.parent_path(), path.string());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace mispron
