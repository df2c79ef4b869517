#pragma once

#include <stdexcept>
#include <string>

namespace gauduchon {

struct degree_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// metric not Hermitian positive definite
struct metric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a form required to be positive definite is not; carries the offending eigenvalue
struct positivity_error : std::runtime_error {
  double min_eigenvalue;
  positivity_error(const std::string& msg, double min_eig)
      : std::runtime_error(msg), min_eigenvalue(min_eig) {}
};

struct solver_error : std::runtime_error {
  double residual;
  solver_error(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gauduchon
