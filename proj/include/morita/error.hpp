#pragma once

#include <stdexcept>
#include <string>

namespace morita {

enum class ErrorKind {
  UnknownSymbol,
  ArityMismatch,
  SortMismatch,
  FreeVariable,
  DuplicateSymbol,
  InvalidSignature,
  MacroNotExpanded,
  ParseError,
  InvalidStructure,
  NotSubsignature,
  NotElementary,
  InvalidStep,
  StepMismatch,
  AdmissibilityFailsInModel,
  SortNotDefinedByStep,
  CodeMismatch,
  FreeVariableNotCovered,
  BoundMismatch,
  NotDiscrete,
  SignatureMismatch,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with 1-based line/column. `file` is empty for in-memory text.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, int column, const std::string& message);

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string file_;
  int line_;
  int column_;
};

}  // namespace morita
