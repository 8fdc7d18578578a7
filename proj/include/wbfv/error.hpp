#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wbfv {

/// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Monotone inversion failed to bracket or converge.
class RootError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
};

/// A time step violated one of its runtime certificates.
class StepError : public Error {
 public:
  StepError(const std::string& what, std::size_t cell) : Error(what), cell_(cell) {}
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

}  // namespace wbfv
