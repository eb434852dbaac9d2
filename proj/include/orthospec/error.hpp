#pragma once

#include <stdexcept>
#include <string>

namespace orthospec {

enum class ErrorKind {
  NotHyperbolic,
  Intersecting,
  Asymptotic,
  SameBase,
  NonPositiveLength,
  UnknownLetter,
  IdentityClass,
  InadmissibleParams,
  BadIndex,
  NotCuspEnd,
  DifferentBoundaries,
  BudgetExceeded,
  NeedsSurface,
  IncoherentMarking,
  AmbiguousCrossing,
  Parse,
  UnknownArc,
  NonPositiveAlpha,
  FormulaMismatch,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace orthospec
