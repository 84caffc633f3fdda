#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace mispron {

/// Therapist-side error classes.
enum class ErrorClass {
  WordSubstitution,
  PhonemeSubstitution,
  WordDeletion,
  PhonemeDeletion,
  WordInsertion,
  PhonemeInsertion,
  Repetition,
  Prosodic,
};

inline constexpr std::array<ErrorClass, 8> kErrorClasses = {
    ErrorClass::WordSubstitution, ErrorClass::PhonemeSubstitution, ErrorClass::WordDeletion,
    ErrorClass::PhonemeDeletion,  ErrorClass::WordInsertion,       ErrorClass::PhonemeInsertion,
    ErrorClass::Repetition,       ErrorClass::Prosodic,
};

inline constexpr std::string_view to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::WordSubstitution: return "WordSubstitution";
    case ErrorClass::PhonemeSubstitution: return "PhonemeSubstitution";
    case ErrorClass::WordDeletion: return "WordDeletion";
    case ErrorClass::PhonemeDeletion: return "PhonemeDeletion";
    case ErrorClass::WordInsertion: return "WordInsertion";
    case ErrorClass::PhonemeInsertion: return "PhonemeInsertion";
    case ErrorClass::Repetition: return "Repetition";
    case ErrorClass::Prosodic: return "Prosodic";
  }
  return "?";
}

inline std::optional<ErrorClass> error_class_from_string(std::string_view name) {
  for (const auto c : kErrorClasses)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

/// ASR-side error types recoverable from an edit script.
enum class AsrErrorClass {
  WordSubstitution,
  WordDeletion,
  WordInsertion,
  PhonemeSubstitution,
  PhonemeDeletion,
  PhonemeInsertion,
};

inline constexpr std::array<AsrErrorClass, 6> kAsrErrorClasses = {
    AsrErrorClass::WordSubstitution,    AsrErrorClass::WordDeletion,    AsrErrorClass::WordInsertion,
    AsrErrorClass::PhonemeSubstitution, AsrErrorClass::PhonemeDeletion, AsrErrorClass::PhonemeInsertion,
};

inline constexpr std::string_view to_string(AsrErrorClass c) {
  switch (c) {
    case AsrErrorClass::WordSubstitution: return "WordSubstitution";
    case AsrErrorClass::WordDeletion: return "WordDeletion";
    case AsrErrorClass::WordInsertion: return "WordInsertion";
    case AsrErrorClass::PhonemeSubstitution: return "PhonemeSubstitution";
    case AsrErrorClass::PhonemeDeletion: return "PhonemeDeletion";
    case AsrErrorClass::PhonemeInsertion: return "PhonemeInsertion";
  }
  return "?";
}

inline std::optional<AsrErrorClass> asr_error_class_from_string(std::string_view name) {
  for (const auto c : kAsrErrorClasses)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

inline constexpr std::size_t index_of(ErrorClass c) { return static_cast<std::size_t>(c); }
inline constexpr std::size_t index_of(AsrErrorClass c) { return static_cast<std::size_t>(c); }

enum class Severity { Mild, Moderate, Severe };

inline constexpr std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Mild: return "Mild";
    case Severity::Moderate: return "Moderate";
    case Severity::Severe: return "Severe";
  }
  return "?";
}

/// Ordinal code used when correlating against clarity: Mild=1 .. Severe=3.
inline constexpr int ordinal(Severity s) { return static_cast<int>(s) + 1; }

}  // namespace mispron
