#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lmgf {

using cplx = std::complex<double>;

template <typename T>
using Matrix3c = Eigen::Matrix<std::complex<T>, 3, 3>;
template <typename T>
using Vector3c = Eigen::Matrix<std::complex<T>, 3, 1>;

using Mat3 = Matrix3c<double>;
using Vec3 = Vector3c<double>;

inline constexpr cplx iu{0.0, 1.0};

// relative distance in max norm; guards against a zero reference
template <typename Derived, typename Derived2>
double rel_error(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived2>& ref) {
  const double scale = ref.cwiseAbs().maxCoeff();
  const double diff = (a - ref).cwiseAbs().maxCoeff();
  return scale > 0 ? diff / scale : diff;
}

}  // namespace lmgf
