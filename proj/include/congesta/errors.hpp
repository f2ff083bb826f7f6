#pragma once

#include <stdexcept>
#include <string>

namespace congesta {

/// How a failure maps onto the CLI exit code.
enum class FailureKind {
  kConfig,     // malformed input or data violating a standing assumption (exit 2)
  kAssertion,  // a hard numerical invariant was violated (exit 3)
  kSolver,     // the solver gave up after retries (exit 4)
};

class Error : public std::runtime_error {
 public:
  Error(FailureKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  FailureKind kind() const { return kind_; }

 private:
  FailureKind kind_;
};

#define CONGESTA_ERROR(Name, Kind)                                          \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(FailureKind::Kind, what) {} \
  };

CONGESTA_ERROR(ConfigError, kConfig)
CONGESTA_ERROR(DimensionMismatch, kConfig)
CONGESTA_ERROR(InvalidBoundarySpec, kConfig)
CONGESTA_ERROR(NegativeFlux, kConfig)
CONGESTA_ERROR(MassExceedsOne, kConfig)
CONGESTA_ERROR(MomentumOnVacuum, kConfig)
CONGESTA_ERROR(AlphaTooSmall, kConfig)
CONGESTA_ERROR(ArtifactError, kConfig)

CONGESTA_ERROR(NonSmoothPoint, kAssertion)
CONGESTA_ERROR(ConjugateOverflow, kAssertion)
CONGESTA_ERROR(NonMonotoneScheme, kAssertion)
CONGESTA_ERROR(MaxPrincipleViolated, kAssertion)
CONGESTA_ERROR(MassLedgerViolated, kAssertion)
CONGESTA_ERROR(FenchelYoungViolated, kAssertion)
CONGESTA_ERROR(NegativeDefect, kAssertion)

CONGESTA_ERROR(LinearSolveFailure, kSolver)
CONGESTA_ERROR(SingularMassMatrix, kSolver)
CONGESTA_ERROR(NewtonDivergence, kSolver)
CONGESTA_ERROR(FixedPointStall, kSolver)

#undef CONGESTA_ERROR

}  // namespace congesta
