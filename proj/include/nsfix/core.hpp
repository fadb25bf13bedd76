#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace nsfix {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

/// Raised when an operation's precondition or a type invariant is violated.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw Error(message);
    }
}

/// Principal-branch power r^z for r > 0, evaluated as exp(z ln r).
inline Complex cpow(double r, Complex z)
{
    return std::exp(z * std::log(r));
}

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

} // namespace nsfix
