#pragma once

// Members train concurrently; Eigen must not spawn its own threads inside them.
#define EIGEN_DONT_PARALLELIZE

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Error taxonomy shared across modules. The CLI maps each class to a fixed
// exit code, so keep the hierarchy flat and stable.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hnn
