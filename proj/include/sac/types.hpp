#ifndef SAC_TYPES_HPP
#define SAC_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sac {

using Index = Eigen::Index;

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A function in H represented by its coefficients in the eigenbasis.
template <class Scalar>
using Field = ArrayX<Scalar>;

/// Point values on the interior collocation nodes.
template <class Scalar>
using NodalValues = ArrayX<Scalar>;

/// Thrown when an iteration fails to meet its certified tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sac

#endif  // SAC_TYPES_HPP
