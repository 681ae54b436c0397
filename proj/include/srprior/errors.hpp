#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srprior {

// Base for every library error. kind() is a stable identifier used by the
// CLI's machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  std::string_view kind() const noexcept { return kind_; }

 private:
  std::string_view kind_;
};

#define SRPRIOR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  }

SRPRIOR_DEFINE_ERROR(RadicandNegative);
SRPRIOR_DEFINE_ERROR(InvalidSpec);
SRPRIOR_DEFINE_ERROR(DegenerateMass);
SRPRIOR_DEFINE_ERROR(DomainExit);
SRPRIOR_DEFINE_ERROR(NearBoundary);
SRPRIOR_DEFINE_ERROR(InitOutOfDomain);
SRPRIOR_DEFINE_ERROR(SimplexViolation);
SRPRIOR_DEFINE_ERROR(EmptyChain);
SRPRIOR_DEFINE_ERROR(InvalidParameter);
SRPRIOR_DEFINE_ERROR(DimensionMismatch);
SRPRIOR_DEFINE_ERROR(AllZeroIntegrand);
SRPRIOR_DEFINE_ERROR(ConfigError);
SRPRIOR_DEFINE_ERROR(CsvError);
SRPRIOR_DEFINE_ERROR(NonPositiveTheta);
SRPRIOR_DEFINE_ERROR(NonPositiveSigma);
SRPRIOR_DEFINE_ERROR(NonPositiveVariance);
SRPRIOR_DEFINE_ERROR(PhiOutOfRange);
SRPRIOR_DEFINE_ERROR(CountOutOfRange);

#undef SRPRIOR_DEFINE_ERROR

}  // namespace srprior
