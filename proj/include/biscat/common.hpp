#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace biscat {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;
inline constexpr cplx kI{0.0, 1.0};

// Error kinds surfaced by the library. Each kind is its own exception type so
// callers can catch selectively; all derive from biscat::Error.
enum class ErrorKind {
  BranchCut,
  QuadratureNonConverged,
  UnsupportedOrder,
  AliasedSpectrum,
  OutOfDomain,
  GridMismatch,
  EmptySupport,
  SingularAtLambda,
  NotGMU,
  ZeroOffset,
  DegenerateMoments,
  Borderline,
  SingularPotential,
  LambdaOutOfRange,
  BNotInvertible,
  SchurSingular,
  KernelNotIntegrable,
  MajorantDiverges,
  UnknownOperator,
  InvalidArgument,
  Io,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define BISCAT_DECLARE_ERROR(Name)                                      \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {} \
  };

BISCAT_DECLARE_ERROR(BranchCut)
BISCAT_DECLARE_ERROR(QuadratureNonConverged)
BISCAT_DECLARE_ERROR(UnsupportedOrder)
BISCAT_DECLARE_ERROR(AliasedSpectrum)
BISCAT_DECLARE_ERROR(OutOfDomain)
BISCAT_DECLARE_ERROR(GridMismatch)
BISCAT_DECLARE_ERROR(EmptySupport)
BISCAT_DECLARE_ERROR(SingularAtLambda)
BISCAT_DECLARE_ERROR(NotGMU)
BISCAT_DECLARE_ERROR(ZeroOffset)
BISCAT_DECLARE_ERROR(DegenerateMoments)
BISCAT_DECLARE_ERROR(Borderline)
BISCAT_DECLARE_ERROR(SingularPotential)
BISCAT_DECLARE_ERROR(LambdaOutOfRange)
BISCAT_DECLARE_ERROR(BNotInvertible)
BISCAT_DECLARE_ERROR(SchurSingular)
BISCAT_DECLARE_ERROR(KernelNotIntegrable)
BISCAT_DECLARE_ERROR(MajorantDiverges)
BISCAT_DECLARE_ERROR(UnknownOperator)
BISCAT_DECLARE_ERROR(InvalidArgument)
BISCAT_DECLARE_ERROR(Io)

#undef BISCAT_DECLARE_ERROR

// Worker count: BISCAT_THREADS if set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots so the outcome does not depend on
// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// <t> = sqrt(1 + t^2)
inline double japanese(double t) { return std::sqrt(1.0 + t * t); }

}  // namespace biscat
