#pragma once

#include <stdexcept>
#include <string>

namespace jitvd {

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in CLI error payloads.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Raised for bad user input (malformed sources, corpora, configs). The CLI
/// maps these to exit code 2; everything else is internal.
class InputError : public Error {
 public:
  using Error::Error;
};

class LexError : public InputError {
 public:
  LexError(int line, int col, const std::string& what)
      : InputError("LexError", std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

class ParseError : public InputError {
 public:
  ParseError(int line, int col, std::string expected, std::string found)
      : InputError("ParseError", std::to_string(line) + ":" + std::to_string(col) + ": expected " +
                                     expected + ", found '" + found + "'"),
        line(line),
        col(col),
        expected(std::move(expected)),
        found(std::move(found)) {}
  int line;
  int col;
  std::string expected;
  std::string found;
};

class MatchingInvalid : public Error {
 public:
  explicit MatchingInvalid(const std::string& m) : Error("MatchingInvalid", m) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& m) : Error("ShapeMismatch", m) {}
};

class EmptyGraph : public Error {
 public:
  explicit EmptyGraph(const std::string& m = "graph has no nodes") : Error("EmptyGraph", m) {}
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(const std::string& m) : Error("NonFiniteLoss", m) {}
};

class NotAttentionModel : public InputError {
 public:
  NotAttentionModel() : InputError("NotAttentionModel", "attention explainer requires an rgat model") {}
};

class CorpusFormatError : public InputError {
 public:
  CorpusFormatError(std::string commit, const std::string& m)
      : InputError("CorpusFormatError", (commit.empty() ? m : "commit " + commit + ": " + m)),
        commit_id(std::move(commit)) {}
  std::string commit_id;
};

class LineOutOfRange : public InputError {
 public:
  explicit LineOutOfRange(const std::string& m) : InputError("LineOutOfRange", m) {}
};

class LengthMismatch : public InputError {
 public:
  explicit LengthMismatch(const std::string& m) : InputError("LengthMismatch", m) {}
};

class ConfigError : public InputError {
 public:
  explicit ConfigError(const std::string& m) : InputError("ConfigError", m) {}
};

}  // namespace jitvd
