#pragma once

#include <stdexcept>
#include <string>

namespace incompat {

// Exit-code classes used by the command driver.
enum class ErrorClass { Config = 1, Invariant = 2, Solver = 3 };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, ErrorClass cls, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), cls_(cls) {}

  const std::string& kind() const noexcept { return kind_; }
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  std::string kind_;
  ErrorClass cls_;
};

#define INCOMPAT_DEFINE_ERROR(Name, Class)                              \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what)                              \
        : Error(#Name, ErrorClass::Class, what) {}                      \
  };

INCOMPAT_DEFINE_ERROR(ConfigError, Config)
INCOMPAT_DEFINE_ERROR(SymmetryViolation, Invariant)
INCOMPAT_DEFINE_ERROR(EllipticityViolation, Invariant)
INCOMPAT_DEFINE_ERROR(OpenLoop, Invariant)
INCOMPAT_DEFINE_ERROR(KernelTooNarrow, Config)
INCOMPAT_DEFINE_ERROR(LoopTooCloseToBoundary, Config)
INCOMPAT_DEFINE_ERROR(NonZeroMean, Invariant)
INCOMPAT_DEFINE_ERROR(NotDivergenceFree, Invariant)
INCOMPAT_DEFINE_ERROR(NotAdmissible, Invariant)
INCOMPAT_DEFINE_ERROR(BoundViolation, Invariant)
INCOMPAT_DEFINE_ERROR(NoConvergence, Solver)

#undef INCOMPAT_DEFINE_ERROR

}  // namespace incompat
