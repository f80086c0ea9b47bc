#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vbench {

// Non-finite values reached a numeric routine.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Image has no usable orientation (constant or rotationally symmetric mass).
class DegenerateOrientationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The l1 solver hit its iteration cap or an infeasible constraint.
// Carries the best iterate found so callers can inspect or reuse it.
class SolverNotConverged : public std::runtime_error {
public:
    SolverNotConverged(const std::string& what, std::vector<double> best, double residual)
        : std::runtime_error(what), best_iterate(std::move(best)), best_residual(residual) {}

    std::vector<double> best_iterate;
    double best_residual = 0.0;
};

} // namespace vbench
