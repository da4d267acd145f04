#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace hwretail {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeography : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised when a retailer distribution has no populated zone.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (group order, chain state space) was exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Step size underflow in the adaptive integrator; keeps the last accepted state.
class StiffnessError : public NumericalError {
 public:
  StiffnessError(const std::string& what, Eigen::VectorXd last_state, double time)
      : NumericalError(what), last_state_(std::move(last_state)), time_(time) {}

  const Eigen::VectorXd& last_state() const { return last_state_; }
  double time() const { return time_; }

 private:
  Eigen::VectorXd last_state_;
  double time_;
};

}  // namespace hwretail
