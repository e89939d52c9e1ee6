#pragma once

#include <Eigen/Dense>

namespace rrlab {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using RowX = Eigen::Matrix<S, 1, Eigen::Dynamic>;

// Production scalar. Gradient-check and oracle-equivalence tests instantiate
// the templated code paths with double instead.
using Real = float;
using Mat  = MatX<Real>;
using Vec  = VecX<Real>;

}  // namespace rrlab
