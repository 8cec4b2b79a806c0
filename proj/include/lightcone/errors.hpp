#pragma once

#include <stdexcept>
#include <string>

namespace lightcone {

// Root of every error raised by the engine. The CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateTangentError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class FDStencilError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Induced metric failed the positive-definiteness test.
class SpacelikeViolation : public Error {
 public:
  SpacelikeViolation(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class DualUndefinedError : public Error {
 public:
  using Error::Error;
};

class DualDegenerateError : public Error {
 public:
  using Error::Error;
};

// Scalar-flatness precondition of the characteristic second variation.
class SPrecondError : public Error {
 public:
  SPrecondError(const std::string& what, double max_abs_s)
      : Error(what), max_abs_s_(max_abs_s) {}

  double max_abs_s() const { return max_abs_s_; }

 private:
  double max_abs_s_;
};

class StencilRangeError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

}  // namespace lightcone
