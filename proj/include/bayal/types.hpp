#ifndef BAYAL_TYPES_HPP_
#define BAYAL_TYPES_HPP_

#include <Eigen/Dense>
#include <cstdint>

namespace bayal {

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;
using VectorXi = VectorX<int>;

using Index = Eigen::Index;
using Seed = std::uint64_t;

}  // namespace bayal

#endif  // BAYAL_TYPES_HPP_
