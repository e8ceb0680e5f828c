#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coadapt {

// All library failures derive from Error and carry a stable name used by the
// CLI when mapping failures to exit codes and "ERR <Name>" diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define COADAPT_ERROR(NAME)                                       \
  struct NAME : Error {                                           \
    explicit NAME(const std::string& w) : Error(#NAME, w) {}      \
  }

COADAPT_ERROR(InvalidArgument);
COADAPT_ERROR(SchemaError);
COADAPT_ERROR(FileNotFound);
COADAPT_ERROR(DataError);
COADAPT_ERROR(EmptyCategory);
COADAPT_ERROR(NoDonor);
COADAPT_ERROR(InvalidPrior);
COADAPT_ERROR(DimensionMismatch);
COADAPT_ERROR(InsufficientHistory);
COADAPT_ERROR(OutOfBounds);
COADAPT_ERROR(CycleDetected);
COADAPT_ERROR(UnknownVariable);
COADAPT_ERROR(NumericOverflow);
COADAPT_ERROR(WindowTooLong);
COADAPT_ERROR(DegenerateSeries);
COADAPT_ERROR(BlockTooLong);
COADAPT_ERROR(SeriesTooShort);
COADAPT_ERROR(TooManyPoints);

#undef COADAPT_ERROR

struct NonConvergence : Error {
  NonConvergence(const std::string& w, int iters, double resid)
      : Error("NonConvergence", w), iterations(iters), residual(resid) {}
  int iterations;
  double residual;
};

struct BudgetExhausted : Error {
  explicit BudgetExhausted(const std::string& w) : Error("BudgetExhausted", w) {}
};

}  // namespace coadapt
