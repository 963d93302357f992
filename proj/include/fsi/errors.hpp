// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fsi {

// Zero or near-zero pivot while factorizing a (sub-)block. Carries the
// block label so smoother failures can be traced to a Vanka block.
class SingularBlockError : public std::runtime_error {
 public:
  explicit SingularBlockError(const std::string& label)
      : std::runtime_error("singular block: " + label), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// Non-positive Jacobian determinant during quadrature, either of the mesh
// geometry or of a deformation state. Consumed by the Newton line search.
class ElementInversionError : public std::runtime_error {
 public:
  explicit ElementInversionError(int element)
      : std::runtime_error("inverted element " + std::to_string(element)), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fsi
