#pragma once

#include <stdexcept>
#include <string>

namespace mixedcurv {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateMetric : Error {
  explicit DegenerateMetric(const std::string& w) : Error("DegenerateMetric: " + w) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error("ShapeError: " + w) {}
};

struct FrameError : Error {
  explicit FrameError(const std::string& w) : Error("FrameError: " + w) {}
};

struct NumericalInstability : Error {
  explicit NumericalInstability(const std::string& w) : Error("NumericalInstability: " + w) {}
};

struct BadInput : Error {
  explicit BadInput(const std::string& w) : Error("BadInput: " + w) {}
};

struct DegenerateDistribution : Error {
  explicit DegenerateDistribution(const std::string& w) : Error("DegenerateDistribution: " + w) {}
};

struct FlavorViolation : Error {
  explicit FlavorViolation(const std::string& w) : Error("FlavorViolation: " + w) {}
};

struct PreconditionFailed : Error {
  explicit PreconditionFailed(const std::string& w) : Error("PreconditionFailed: " + w) {}
};

struct Unsupported : Error {
  explicit Unsupported(const std::string& w) : Error("Unsupported: " + w) {}
};

}  // namespace mixedcurv
