#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace extdesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the design space (dimension d).
using DesignPoint = Eigen::VectorXd;
/// A point of the parameter space (dimension p).
using ParameterVector = Eigen::VectorXd;
/// Finite design space: the candidate support points.
using DesignSpace = std::vector<DesignPoint>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch or invalid model input.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable numerical result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Unknown name in a registry (models, functionals).
class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Invalid design measure.
class DesignError : public Error {
 public:
  using Error::Error;
};

/// Invalid criterion specification or empty admissible set.
class CriterionError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or serialized input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace extdesign
