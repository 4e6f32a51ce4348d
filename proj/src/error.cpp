#include "beatscope/error.hpp"

namespace beatscope {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedManifest: return "MalformedManifest";
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::MalformedConfig: return "MalformedConfig";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NonUniformTimeAxis: return "NonUniformTimeAxis";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::EmptyAxis: return "EmptyAxis";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::Underdetermined: return "Underdetermined";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::DivisionByNegligible: return "DivisionByNegligible";
    case ErrorKind::UnresolvedGrid: return "UnresolvedGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace beatscope
