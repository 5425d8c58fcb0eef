#pragma once

#include <stdexcept>
#include <string>

namespace marked {

/// Raised when an enumeration, convolution or search hits its configured
/// resource cap before finishing. The computation is abandoned, never
/// silently truncated.
struct ResourceExceeded : std::runtime_error {
  explicit ResourceExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: group definition files, experiment configs, CLI flags.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An exact identity or inequality that must hold by construction failed.
struct InvariantViolated : std::runtime_error {
  explicit InvariantViolated(const std::string& what) : std::runtime_error(what) {}
};

/// The requested quantity is undefined for this input (e.g. a cogrowth
/// formula on a group with trivial kernel).
struct NotApplicable : std::runtime_error {
  explicit NotApplicable(const std::string& what) : std::runtime_error(what) {}
};

/// A claimed free-basis certificate could not be established; carries the
/// offending word in the candidate alphabet (indices into the basis,
/// negative for inverses).
struct CertificationFailed : std::runtime_error {
  CertificationFailed(const std::string& what, std::vector<int> witness_word)
      : std::runtime_error(what), witness(std::move(witness_word)) {}
  std::vector<int> witness;
};

/// Generator images do not define a homomorphism (a relator survives).
struct InvalidHomomorphism : std::runtime_error {
  explicit InvalidHomomorphism(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace marked
