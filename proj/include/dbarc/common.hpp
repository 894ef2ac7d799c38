#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dbarc {

using cplx = std::complex<double>;
using quad = __float128;

inline constexpr double kPi = 3.14159265358979323846;

// Bad user input: shape mismatch, out-of-range parameters, malformed files.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical self-check failed (cross-validation, residual, period audit).
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDomain : InputError {
    using InputError::InputError;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

}  // namespace dbarc
