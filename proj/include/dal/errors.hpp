#pragma once

#include <stdexcept>
#include <string>

namespace dal {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct SyntaxError : Error {
  SyntaxError(const std::string& m, int line, int column)
      : Error(m + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct DifferentialCapture : Error {
  using Error::Error;
};
struct NestedDifferential : Error {
  using Error::Error;
};
struct PrimedInput : Error {
  using Error::Error;
};
struct MissingVariable : Error {
  using Error::Error;
};
struct NonSquare : Error {
  using Error::Error;
};
struct ResourceLimit : Error {
  using Error::Error;
};
struct UnknownAxiom : Error {
  using Error::Error;
};
struct KindMismatch : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct SideCondition : Error {
  using Error::Error;
};
struct ChainMismatch : Error {
  using Error::Error;
};
struct SingularJacobian : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  NoConvergence(const std::string& m, double residual)
      : Error(m + " (residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};
struct JacobianDegenerate : Error {
  JacobianDegenerate(const std::string& m, double time)
      : Error(m + " at t=" + std::to_string(time)), time(time) {}
  double time;
};

}  // namespace dal
