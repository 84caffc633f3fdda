#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mispron {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, out-of-domain arguments. The CLI maps
/// these to exit code 2.
class InputError : public Error {
public:
  using Error::Error;
};

/// A postcondition the library guarantees did not hold. Exit code 3.
class InvariantViolation : public Error {
public:
  using Error::Error;
};

/// Input error tied to a line of a text file.
class LineError : public InputError {
public:
  LineError(const std::string& kind, std::string source, std::size_t line_no,
            const std::string& detail)
      : InputError(source + ":" + std::to_string(line_no) + ": " + kind +
                   (detail.empty() ? "" : ": " + detail)),
        source_(std::move(source)),
        line_no_(line_no) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line_no() const noexcept { return line_no_; }

private:
  std::string source_;
  std::size_t line_no_;
};

class MalformedLexiconLine : public LineError {
public:
  MalformedLexiconLine(std::string source, std::size_t line_no, const std::string& detail = {})
      : LineError("malformed lexicon line", std::move(source), line_no, detail) {}
};

class MalformedLabelLine : public LineError {
public:
  MalformedLabelLine(std::string source, std::size_t line_no, const std::string& detail = {})
      : LineError("malformed label line", std::move(source), line_no, detail) {}
};

class NegativeDuration : public LineError {
public:
  NegativeDuration(std::string source, std::size_t line_no, const std::string& detail = {})
      : LineError("negative duration", std::move(source), line_no, detail) {}
};

class MalformedOverrideLine : public LineError {
public:
  MalformedOverrideLine(std::string source, std::size_t line_no, const std::string& detail = {})
      : LineError("malformed override line", std::move(source), line_no, detail) {}
};

class UnmappedLabel : public InputError {
public:
  explicit UnmappedLabel(std::string label)
      : InputError("unmapped label: \"" + label + "\" (add it to the override file)"),
        label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }

private:
  std::string label_;
};

class UnparseableExactError : public InputError {
public:
  explicit UnparseableExactError(const std::string& text)
      : InputError("no target in exact error \"" + text + "\"") {}
};

class ZeroReference : public InputError {
public:
  ZeroReference() : InputError("reference has zero words") {}
};

class CountExceedsTotal : public InputError {
public:
  CountExceedsTotal(std::size_t count, std::size_t total)
      : InputError("words in error (" + std::to_string(count) + ") exceeds total words (" +
                   std::to_string(total) + ")") {}
};

class IndexOutOfRange : public InputError {
public:
  using InputError::InputError;
};

class EmptyRun : public InputError {
public:
  EmptyRun() : InputError("detection has no edit operations") {}
};

class ZeroVariance : public InputError {
public:
  ZeroVariance() : InputError("zero variance: correlation undefined for a constant vector") {}
};

class LengthMismatch : public InputError {
public:
  using InputError::InputError;
};

}  // namespace mispron
