#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::UnbalancedBrackets: return "UnbalancedBrackets";
    case Errc::EmptyLabel: return "EmptyLabel";
    case Errc::TrailingContent: return "TrailingContent";
    case Errc::UnexpectedToken: return "UnexpectedToken";
    case Errc::InvalidLambda: return "InvalidLambda";
    case Errc::LexicalizedInput: return "LexicalizedInput";
    case Errc::DegenerateTree: return "DegenerateTree";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::RowMismatch: return "RowMismatch";
    case Errc::UnknownUtteranceID: return "UnknownUtteranceID";
    case Errc::DuplicateUtteranceID: return "DuplicateUtteranceID";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::BadFormat: return "BadFormat";
    case Errc::Io: return "Io";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::NaNInput: return "NaNInput";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::UnsupportedFeatureSet: return "UnsupportedFeatureSet";
    case Errc::SplitOverlap: return "SplitOverlap";
  }
  return "Unknown";
}

ErrorCategory category(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidLambda:
    case Errc::InvalidConfig:
    case Errc::UnsupportedFeatureSet:
      return ErrorCategory::Usage;
    case Errc::SingularSystem:
    case Errc::ZeroVariance:
    case Errc::NaNInput:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace syntaxprobe
