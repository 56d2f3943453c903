#pragma once

#include <stdexcept>
#include <string>

namespace nls {

// Caller passed something the operation is not defined for.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrationFailure : std::runtime_error {
  IntegrationFailure(const std::string& what, double at)
      : std::runtime_error(what + " (t = " + std::to_string(at) + ")"), time(at) {}
  double time;
};

struct InversionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wave packet reached the edge layer of the periodic box.
struct DomainEscape : std::runtime_error {
  DomainEscape(const std::string& what, double edge_fraction, double at)
      : std::runtime_error(what), fraction(edge_fraction), time(at) {}
  double fraction;
  double time;
};

struct ContractionFailure : std::runtime_error {
  ContractionFailure(const std::string& what, double amp, double t0)
      : std::runtime_error(what), amplitude(amp), T(t0) {}
  double amplitude;
  double T;
};

}  // namespace nls
