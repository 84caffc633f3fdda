#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mispron/error.hpp"
#include "mispron/localizer.hpp"
#include "mispron/text.hpp"

namespace mispron {

/// ASR hypothesis in the adapter exchange format:
/// `{"audio_id": str, "source": str, "words": [{"word": str, "start": s, "end": s}]}`.
struct Transcript {
  std::string audio_id;
  std::string source;
  std::vector<TimedWord> words;  // raw word strings
};

/// Allowed overlap between consecutive words, seconds.
inline constexpr double kWordOverlapTolerance = 0.001;

inline Transcript parse_transcript(const nlohmann::json& j, const std::string& source_name = "<transcript>") {
  auto fail = [&](const std::string& what) { return InputError(source_name + ": " + what); };
  if (!j.is_object()) throw fail("transcript must be a JSON object");
  Transcript t;
  for (const char* key : {"audio_id", "source"}) {
    if (!j.contains(key) || !j[key].is_string()) throw fail(std::string("missing string field \"") + key + "\"");
  }
  t.audio_id = j["audio_id"].get<std::string>();
  t.source = j["source"].get<std::string>();
  if (!j.contains("words") || !j["words"].is_array()) throw fail("missing array field \"words\"");
  std::size_t k = 0;
  for (const auto& w : j["words"]) {
    const std::string where = "words[" + std::to_string(k) + "]";
    if (!w.is_object() || !w.contains("word") || !w["word"].is_string() || !w.contains("start") ||
        !w["start"].is_number() || !w.contains("end") || !w["end"].is_number())
      throw fail(where + ": expected {\"word\": str, \"start\": number, \"end\": number}");
    TimedWord tw{w["word"].get<std::string>(), w["start"].get<double>(), w["end"].get<double>()};
    if (tw.start_s < 0.0) throw fail(where + ": negative start time");
    if (tw.end_s < tw.start_s) throw fail(where + ": end before start");
    if (!t.words.empty()) {
      const auto& prev = t.words.back();
      if (tw.start_s < prev.start_s) throw fail(where + ": words not ordered by start time");
      if (tw.start_s < prev.end_s - kWordOverlapTolerance) throw fail(where + ": overlaps the previous word");
    }
    t.words.push_back(std::move(tw));
    ++k;
  }
  return t;
}

inline Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open transcript: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON at byte " + std::to_string(e.byte));
  }
  return parse_transcript(j, path.string());
}

inline nlohmann::ordered_json to_json(const Transcript& t) {
  nlohmann::ordered_json j;
  j["audio_id"] = t.audio_id;
  j["source"] = t.source;
  j["words"] = nlohmann::ordered_json::array();
  for (const auto& w : t.words) j["words"].push_back({{"word", w.word}, {"start", w.start_s}, {"end", w.end_s}});
  return j;
}

/// Hypothesis words in normalized form. A raw word that normalizes to
/// nothing is dropped; one that splits into several tokens yields several
/// entries sharing its timestamps.
inline std::vector<TimedWord> normalized_words(const Transcript& t) {
  std::vector<TimedWord> out;
  out.reserve(t.words.size());
  for (const auto& w : t.words)
    for (auto& tok : tokenize(w.word)) out.push_back(TimedWord{std::move(tok.norm), w.start_s, w.end_s});
  return out;
}

inline std::vector<Token> load_reference(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open reference text: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return tokenize(buf.str());
}

}  // namespace mispron
