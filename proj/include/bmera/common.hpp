#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bmera {

using cplx = std::complex<double>;

// Execution policy for the data-parallel kernels. `Serial` is the reference
// implementation kept for testing; `Parallel` uses OpenMP when available.
enum class Exec { Serial, Parallel };

Exec default_exec();
void set_default_exec(Exec e);

// Error taxonomy. Codes map 1:1 onto CLI exit codes where applicable.
enum class Errc {
    Generic = 1,
    ConstraintViolation = 2,
    NotMixing = 3,
    OracleMismatch = 4,
    BudgetExceeded = 5,
    DimensionMismatch = 10,
    AxisOutOfRange = 11,
    InvalidPermutation = 12,
    ConvergenceFailure = 13,
    SiteOutOfRange = 14,
    PathUnresolvable = 15,
    OverlappingSupports = 16,
    SignalBelowFloor = 17,
    InvalidConfig = 18,
    IoError = 19,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace bmera
