#pragma once

#include <stdexcept>
#include <string>

namespace beatscope {

enum class ErrorKind {
  MissingFile,
  MalformedManifest,
  MalformedCsv,
  MalformedConfig,
  SizeMismatch,
  NonUniformTimeAxis,
  IoFailure,
  EmptyAxis,
  NonFiniteValue,
  OutOfRange,
  EmptySelection,
  Underdetermined,
  NonPositive,
  NonPositiveFrequency,
  NonPositiveScale,
  NonPositiveInput,
  TooShort,
  DegenerateFit,
  DivisionByNegligible,
  UnresolvedGrid,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI's exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace beatscope
