#ifndef RTE_CORE_HPP
#define RTE_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace rte {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point in parameter space.
using Parameter = std::vector<double>;

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization or reduced solve cannot be trusted.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on malformed artifact files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_parameter(const Parameter& mu, char separator = ';');

} // namespace rte

#endif
