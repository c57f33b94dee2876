#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fmps {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Unconjugated cross product (Eigen's cross() conjugates complex operands).
inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

/// Unconjugated dot product (Eigen's dot() conjugates the first operand).
inline cplx dotu(const CVec3& a, const CVec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

/// Error categories; the numeric values double as CLI exit codes where one exists.
enum class ErrorCode : int {
  Argument = 1,
  Validation = 2,
  NonConvergence = 3,
  Io = 4,
  Numerical = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Argument outside the mathematical domain of an operation (|m| > n, z = 0 for h_n, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Argument, what) {}
};

/// Floating-point overflow or breakdown that would otherwise produce NaN/Inf.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCode::Numerical, what) {}
};

/// A per-degree 2x2 interface system (or radial ratio) is singular to working precision.
class SingularModeError : public NumericalError {
 public:
  SingularModeError(int degree, const std::string& what) : NumericalError(what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

/// Surface projection denominator (j_n(kR) or J_n(kR)) vanishes: interior resonance of the sphere.
class IllConditionedProjection : public NumericalError {
 public:
  IllConditionedProjection(int degree, const std::string& what) : NumericalError(what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error(ErrorCode::Validation, what) {}
};

class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(const std::string& what) : Error(ErrorCode::NonConvergence, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace fmps
