#pragma once

#include <stdexcept>
#include <string>

namespace tvb {

/// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TVB_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

TVB_DEFINE_ERROR(InvalidArgument);
TVB_DEFINE_ERROR(NotStronglyConvex);
TVB_DEFINE_ERROR(InvalidFan);
TVB_DEFINE_ERROR(ConeNotInFan);
TVB_DEFINE_ERROR(NonSmoothCone);
TVB_DEFINE_ERROR(RayNotInFan);
TVB_DEFINE_ERROR(MaterializationTooLarge);
TVB_DEFINE_ERROR(InvalidLabel);
TVB_DEFINE_ERROR(InvalidFlag);
TVB_DEFINE_ERROR(DimensionMismatch);
TVB_DEFINE_ERROR(RaysDoNotSpan);
TVB_DEFINE_ERROR(OutsideSupport);
TVB_DEFINE_ERROR(InvalidIncidence);
TVB_DEFINE_ERROR(ContradictoryConditions);
TVB_DEFINE_ERROR(InternalAudit);
TVB_DEFINE_ERROR(ChernViolationError);
TVB_DEFINE_ERROR(ParseError);

#undef TVB_DEFINE_ERROR

/// Raised when an enumeration exceeds its node budget; carries what was seen so far.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(unsigned long long nodes, unsigned long long found)
      : Error("search budget exceeded after " + std::to_string(nodes) +
              " nodes (" + std::to_string(found) + " solutions found so far)"),
        nodes_(nodes),
        found_(found) {}
  unsigned long long nodes() const noexcept { return nodes_; }
  unsigned long long found() const noexcept { return found_; }

 private:
  unsigned long long nodes_;
  unsigned long long found_;
};

}  // namespace tvb
