#include "orthospec/error.hpp"

namespace orthospec {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::Intersecting: return "Intersecting";
    case ErrorKind::Asymptotic: return "Asymptotic";
    case ErrorKind::SameBase: return "SameBase";
    case ErrorKind::NonPositiveLength: return "NonPositiveLength";
    case ErrorKind::UnknownLetter: return "UnknownLetter";
    case ErrorKind::IdentityClass: return "IdentityClass";
    case ErrorKind::InadmissibleParams: return "InadmissibleParams";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::NotCuspEnd: return "NotCuspEnd";
    case ErrorKind::DifferentBoundaries: return "DifferentBoundaries";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NeedsSurface: return "NeedsSurface";
    case ErrorKind::IncoherentMarking: return "IncoherentMarking";
    case ErrorKind::AmbiguousCrossing: return "AmbiguousCrossing";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::UnknownArc: return "UnknownArc";
    case ErrorKind::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorKind::FormulaMismatch: return "FormulaMismatch";
  }
  return "?";
}

}  // namespace orthospec
