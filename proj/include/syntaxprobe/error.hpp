#ifndef SYNTAXPROBE_ERROR_HPP
#define SYNTAXPROBE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace syntaxprobe {

// Every failure the library can report. The CLI maps these onto exit codes
// through category().
enum class Errc {
  // treebank
  EmptyInput,
  UnbalancedBrackets,
  EmptyLabel,
  TrailingContent,
  UnexpectedToken,
  // treekernel
  InvalidLambda,
  LexicalizedInput,
  DegenerateTree,
  // features
  EmptySequence,
  ZeroVector,
  LengthMismatch,
  RowMismatch,
  UnknownUtteranceID,
  DuplicateUtteranceID,
  NonFiniteValue,
  BadFormat,
  Io,
  // probekit
  InvalidConfig,
  TooFewRows,
  NaNInput,
  SingularSystem,
  ZeroVariance,
  UnsupportedFeatureSet,
  SplitOverlap,
};

enum class ErrorCategory { Usage, Data, Numerical };

const char* errc_name(Errc code) noexcept;
ErrorCategory category(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace syntaxprobe

#endif
