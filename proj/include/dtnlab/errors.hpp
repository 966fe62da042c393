#pragma once

#include <stdexcept>
#include <string>

namespace dtnlab {

// Invalid configuration or arguments; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure during a computation; the CLI maps these to exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyNetwork : ConfigError {
  EmptyNetwork() : ConfigError("EmptyNetwork: at least one node required") {}
  explicit EmptyNetwork(const std::string& what) : ConfigError(what) {}
};

struct InvalidNode : ConfigError {
  explicit InvalidNode(const std::string& what) : ConfigError(what) {}
};

struct InvalidRange : ConfigError {
  explicit InvalidRange(const std::string& what) : ConfigError(what) {}
};

struct HorizonExceeded : ConfigError {
  explicit HorizonExceeded(const std::string& what) : ConfigError(what) {}
};

struct InvalidInput : ConfigError {
  explicit InvalidInput(const std::string& what) : ConfigError(what) {}
};

struct DegenerateWindow : NumericError {
  explicit DegenerateWindow(const std::string& what) : NumericError(what) {}
};

struct TooFewPoints : NumericError {
  explicit TooFewPoints(const std::string& what) : NumericError(what) {}
};

struct NoConvergence : NumericError {
  explicit NoConvergence(const std::string& what) : NumericError(what) {}
};

struct StepTooLarge : NumericError {
  explicit StepTooLarge(const std::string& what) : NumericError(what) {}
};

struct DegenerateInitial : NumericError {
  explicit DegenerateInitial(const std::string& what) : NumericError(what) {}
};

struct DegenerateSamples : NumericError {
  explicit DegenerateSamples(const std::string& what) : NumericError(what) {}
};

struct InconsistentSamples : NumericError {
  explicit InconsistentSamples(const std::string& what) : NumericError(what) {}
};

// A rate series that violates monotonicity of the infected count can only
// come from a corrupted trace, never from a valid run.
struct TraceCorrupt : NumericError {
  explicit TraceCorrupt(const std::string& what) : NumericError(what) {}
};

}  // namespace dtnlab
