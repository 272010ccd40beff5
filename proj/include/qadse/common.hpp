// common.hpp
//
// Error types and small shared helpers used across the library.

#ifndef QADSE_COMMON_HPP
#define QADSE_COMMON_HPP

#include <cstdio>
#include <stdexcept>
#include <string>

namespace qadse {

// Raised for malformed input documents, invariant violations, and
// out-of-range arguments. The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for arithmetic contract violations (e.g. accumulator overflow).
class ArithmeticError : public std::runtime_error {
public:
    explicit ArithmeticError(const std::string& msg) : std::runtime_error(msg) {}
};

// Canonical float formatting for CSV output: 9 significant digits.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace qadse

#endif
