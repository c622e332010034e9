#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace asketch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A requested operation is not supported by the object it was asked of
// (e.g. finite differencing a model that only exposes sampled gradients).
class capability_error : public std::runtime_error {
public:
  explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

// A linear algebra kernel produced garbage (singular solve, non-finite
// values) and the computation cannot continue.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace asketch
