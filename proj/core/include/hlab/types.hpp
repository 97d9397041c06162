#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hlab {

/// A point of the ambient Euclidean space R^m (or of the companion space R^n).
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a map or step produces a NaN or infinite component.
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const Point& x) { return x.allFinite(); }

}  // namespace hlab
