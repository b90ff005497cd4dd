#pragma once

#include <stdexcept>
#include <string>

namespace qepi {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QEPI_DEFINE_ERROR(Name)              \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

QEPI_DEFINE_ERROR(NotHermitian);
QEPI_DEFINE_ERROR(NotPositive);
QEPI_DEFINE_ERROR(TraceNotOne);
QEPI_DEFINE_ERROR(DimensionMismatch);
QEPI_DEFINE_ERROR(CovarianceNotSPD);
QEPI_DEFINE_ERROR(GridTooCoarse);
QEPI_DEFINE_ERROR(UnknownFamily);
QEPI_DEFINE_ERROR(InvalidParameters);
QEPI_DEFINE_ERROR(NotAProbabilityTable);
QEPI_DEFINE_ERROR(IncompatibleGrids);
QEPI_DEFINE_ERROR(ScheduleTooCoarse);
QEPI_DEFINE_ERROR(NotConditionallyIndependent);
QEPI_DEFINE_ERROR(GridBudgetExceeded);
QEPI_DEFINE_ERROR(ConfigInvalid);

#undef QEPI_DEFINE_ERROR

}  // namespace qepi
