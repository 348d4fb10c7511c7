#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subsuper {

// Base class for all failures that carry domain meaning. Precondition
// violations on plain arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A singular power s^e with e < 0 was evaluated at s <= 0, i.e. outside
// the positive cone where the nonlinearities are defined.
class SingularityError : public Error {
public:
    using Error::Error;
};

// A barrier field is nonpositive at an interior node: the discrete
// Hopf-type lower bound failed (mesh too coarse or exponents at the
// feasibility edge).
class BarrierDegeneracy : public Error {
public:
    using Error::Error;
};

// One failed comparison inequality: which node, which inequality, and by
// how much (margin < 0 means failure).
struct Violation {
    std::size_t node = 0;
    std::string name;
    double margin = 0.0;
};

// No multiplier C <= c_max satisfies the comparison inequalities.
class CalibrationFailure : public Error {
public:
    CalibrationFailure(const std::string& msg, Violation worst, double c_tried)
        : Error(msg), worst_violation(std::move(worst)), last_c_tried(c_tried) {}

    Violation worst_violation;
    double last_c_tried = 0.0;
};

// Iteration budget exhausted. Carries the last iterate so callers can
// inspect it; never used to smuggle out a silently-bad field.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& msg, std::vector<double> last, double res, int iters)
        : Error(msg), last_values(std::move(last)), residual(res), iterations(iters) {}

    std::vector<double> last_values;
    double residual = 0.0;
    int iterations = 0;
};

// Config file rejected; line is 1-based, 0 when not tied to a line.
class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& msg, int line_no)
        : Error(msg), line(line_no) {}

    int line = 0;
};

} // namespace subsuper
