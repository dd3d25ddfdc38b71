#pragma once

#include <stdexcept>
#include <string>

namespace vdicke {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VDICKE_ERROR(Name)                        \
    class Name : public Error {                   \
    public:                                       \
        explicit Name(const std::string& what)    \
            : Error(#Name ": " + what) {}         \
    }

VDICKE_ERROR(InvalidParams);
VDICKE_ERROR(DomainError);
VDICKE_ERROR(NotSuperradiant);
VDICKE_ERROR(NoConvergence);
VDICKE_ERROR(EigensolverFailure);
VDICKE_ERROR(UnphysicalState);
VDICKE_ERROR(InconsistentRaman);
VDICKE_ERROR(ZeroDetuning);
VDICKE_ERROR(StepSizeUnderflow);
VDICKE_ERROR(ConstraintDriftExceeded);
VDICKE_ERROR(BothCouplingsZero);
VDICKE_ERROR(NotConverged);

#undef VDICKE_ERROR

/// Schema or value problem in a run configuration. The message carries the
/// location and is not prefixed, so wrapping adds context without repetition.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace vdicke
