#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ddag {

// Base class for every error raised by the library. Callers that only need
// "did it work" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structural invariant of a domain type was violated (cyclic B, bad noise
// variance, asymmetric covariance, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidCovarianceError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class VertexMismatchError : public Error {
 public:
  using Error::Error;
};

class GenerationExhaustedError : public Error {
 public:
  GenerationExhaustedError(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// The l1 program has no feasible point at the requested radius.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const { return best_residual_; }
  int iterations() const { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

// Ordering stage found no vertex with a zero diagonal while more than one
// vertex remained. Carries the offending matrix for diagnosis.
class StallError : public Error {
 public:
  StallError(const std::string& what, Eigen::MatrixXd stuck, std::vector<int> labels)
      : Error(what), stuck_(std::move(stuck)), labels_(std::move(labels)) {}
  const Eigen::MatrixXd& stuck_matrix() const { return stuck_; }
  const std::vector<int>& labels() const { return labels_; }

 private:
  Eigen::MatrixXd stuck_;
  std::vector<int> labels_;
};

}  // namespace ddag
