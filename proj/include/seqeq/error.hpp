#pragma once

#include <stdexcept>
#include <string>

namespace seqeq {

enum class ErrorKind {
  CombinationalCycle,
  DanglingRef,
  DuplicateName,
  UnknownNet,
  NoSuchInstance,
  SyntaxError,
  DuplicatePort,
  WidthMismatch,
  UnknownParameter,
  UnknownModule,
  UnknownIdentifier,
  RecursiveInstantiation,
  MultipleDrivers,
  UndrivenNet,
  ZeroWidth,
  MissingInput,
  TraceTooShort,
  UnmappedOutput,
  AmbiguousRule,
  SignatureMismatchConfig,
  UnmappedState,
  LatencyMismatchUnspecified,
  IncompleteSplit,
  SizeOutOfRange,
  NoMutationSite,
  IoError,
  ConfigError,
  Usage,
};

const char* to_string(ErrorKind kind);

/// Every failure surfaced by the library. `detail()` names the offending
/// net, key, or location; `what()` is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace seqeq
