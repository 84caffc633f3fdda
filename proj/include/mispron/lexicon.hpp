#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mispron/error.hpp"

namespace mispron {

enum class PhonemeSource { Lexicon, Fallback };

struct PhonemeSeq {
  std::vector<std::string> phones;
  PhonemeSource source = PhonemeSource::Lexicon;

  bool operator==(const PhonemeSeq&) const = default;
};

/// Word to pronunciation map read from CMUdict-format text. Immutable once
/// built; lookups are case-insensitive on ASCII.
class Lexicon {
public:
  using Pronunciation = std::vector<std::string>;

  Lexicon() = default;

  /// Parses CMUdict lines: `WORD  PH1 PH2 ...`, variants as `WORD(2)`,
  /// `;;;` comments and blank lines skipped, trailing `# ...` comments cut.
  static Lexicon parse(std::istream& in, const std::string& source_name = "<lexicon>") {
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.rfind(";;;", 0) == 0) continue;
      if (const auto hash = line.find(" #"); hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::string word;
      if (!(fields >> word)) continue;
      Pronunciation phones;
      for (std::string sym; fields >> sym;) phones.push_back(strip_stress(sym));
      if (phones.empty()) throw MalformedLexiconLine(source_name, line_no, "no phonemes for \"" + word + "\"");
      lex.add(base_word(word), std::move(phones));
    }
    return lex;
  }

  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon file: " + path.string());
    return parse(in, path.string());
  }

  /// Appends a pronunciation variant. Word is lowercased; phones are taken as is.
  void add(std::string_view word, Pronunciation phones) {
    for (const auto& p : phones) inventory_.insert(p);
    entries_[lowercase(word)].push_back(std::move(phones));
  }

  /// All variants in file order, or nullptr when absent.
  const std::vector<Pronunciation>* find(std::string_view word) const {
    const auto it = entries_.find(lowercase(word));
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view word) const { return find(word) != nullptr; }

  /// First variant when listed; otherwise one uppercased pseudo-phoneme per
  /// letter or digit (the whole word as one symbol if it has neither).
  PhonemeSeq phonemes_of(std::string_view word) const {
    if (const auto* variants = find(word); variants && !variants->empty())
      return PhonemeSeq{variants->front(), PhonemeSource::Lexicon};
    PhonemeSeq seq{{}, PhonemeSource::Fallback};
    for (const char c : word) {
      const auto uc = static_cast<unsigned char>(c);
      if (std::isalnum(uc)) seq.phones.emplace_back(1, static_cast<char>(std::toupper(uc)));
    }
    if (seq.phones.empty() && !word.empty()) seq.phones.emplace_back(word);
    return seq;
  }

  /// Phoneme symbols declared by the loaded entries.
  const std::set<std::string>& inventory() const noexcept { return inventory_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  static std::string strip_stress(std::string_view sym) {
    std::string out(sym);
    while (out.size() > 1 && (out.back() == '0' || out.back() == '1' || out.back() == '2')) out.pop_back();
    return out;
  }

private:
  static std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  // "WORD(2)" -> "WORD"
  static std::string_view base_word(std::string_view w) {
    if (w.size() > 3 && w.back() == ')') {
      const auto open = w.rfind('(');
      if (open != std::string_view::npos && open > 0 && open + 2 < w.size() &&
          std::all_of(w.begin() + static_cast<std::ptrdiff_t>(open) + 1, w.end() - 1,
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return w.substr(0, open);
    }
    return w;
  }

  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
  std::set<std::string> inventory_;
};

inline Lexicon load_lexicon(const std::filesystem::path& path) { return Lexicon::load(path); }

inline PhonemeSeq phonemes_of(std::string_view word, const Lexicon& lex) { return lex.phonemes_of(word); }

/// Concatenated phonemes of every space-separated word in `phrase`.
inline std::vector<std::string> phonemes_of_phrase(std::string_view phrase, const Lexicon& lex) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && phrase[i] == ' ') ++i;
    std::size_t j = i;
    while (j < phrase.size() && phrase[j] != ' ') ++j;
    if (j > i) {
      auto seq = lex.phonemes_of(phrase.substr(i, j - i));
      out.insert(out.end(), std::make_move_iterator(seq.phones.begin()),
                 std::make_move_iterator(seq.phones.end()));
    }
    i = j;
  }
  return out;
}

}  // namespace mispron
