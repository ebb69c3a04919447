#pragma once

// Nine-matrix basis J1..J9 over the horizontal wavevector (kx, ky), with the
// closed multiplication table and decomposition of arbitrary 3x3 matrices.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>

#include "lmgf/errors.hpp"
#include "lmgf/types.hpp"

namespace lmgf {

template <typename T>
struct SpectralPoint {
  T kx{0};
  T ky{0};
  T k_rho{0};
  T alpha{0};

  SpectralPoint() = default;
  SpectralPoint(T kx_, T ky_) : kx(kx_), ky(ky_), k_rho(std::hypot(kx_, ky_)), alpha(std::atan2(ky_, kx_)) {}

  // keeps k_rho exactly as given so that solvers never see alpha
  static SpectralPoint from_polar(T k_rho, T alpha) {
    SpectralPoint p;
    p.kx = k_rho * std::cos(alpha);
    p.ky = k_rho * std::sin(alpha);
    p.k_rho = k_rho;
    p.alpha = alpha;
    return p;
  }

  T k_rho_sq() const { return k_rho * k_rho; }
};

enum class BasisClass { R, I };

inline BasisClass product_class(BasisClass a, BasisClass b) {
  return a == b ? BasisClass::R : BasisClass::I;
}

inline BasisClass basis_class(int index) { return index <= 5 ? BasisClass::R : BasisClass::I; }

// polynomial degree of the entries of J_index in (kx, ky)
inline int basis_degree(int index) {
  switch (index) {
    case 1: case 2: case 9: return 0;
    case 3: case 4: case 6: case 7: return 1;
    default: return 2;
  }
}

template <typename T>
Matrix3c<T> basis_matrix(int index, const SpectralPoint<T>& p) {
  using C = std::complex<T>;
  const C ikx(0, p.kx), iky(0, p.ky);
  Matrix3c<T> m = Matrix3c<T>::Zero();
  switch (index) {
    case 1: m(0, 0) = 1; m(1, 1) = 1; break;
    case 2: m(2, 2) = 1; break;
    case 3: m(0, 2) = ikx; m(1, 2) = iky; break;
    case 4: m(2, 0) = ikx; m(2, 1) = iky; break;
    case 5:
      m(0, 0) = -p.kx * p.kx; m(0, 1) = -p.kx * p.ky;
      m(1, 0) = -p.kx * p.ky; m(1, 1) = -p.ky * p.ky;
      break;
    case 6: m(2, 0) = -iky; m(2, 1) = ikx; break;
    case 7: m(0, 2) = iky; m(1, 2) = -ikx; break;
    case 8:
      m(0, 0) = p.kx * p.ky; m(0, 1) = p.ky * p.ky;
      m(1, 0) = -p.kx * p.kx; m(1, 1) = -p.kx * p.ky;
      break;
    case 9: m(0, 1) = 1; m(1, 0) = -1; break;
    default: throw Error(ErrorKind::InvalidArgument, "basis index must be in 1..9");
  }
  return m;
}

// J5 and J8 divided by k_rho^2: finite unit-direction forms used for stable assembly
template <typename T>
Matrix3c<T> basis_matrix_normalized(int index, T alpha) {
  const T c = std::cos(alpha), s = std::sin(alpha);
  Matrix3c<T> m = Matrix3c<T>::Zero();
  if (index == 5) {
    m(0, 0) = -c * c; m(0, 1) = -c * s; m(1, 0) = -c * s; m(1, 1) = -s * s;
  } else if (index == 8) {
    m(0, 0) = c * s; m(0, 1) = s * s; m(1, 0) = -c * c; m(1, 1) = -c * s;
  } else {
    throw Error(ErrorKind::InvalidArgument, "only J5 and J8 have a normalized form");
  }
  return m;
}

template <typename T>
struct BasisCoefficients {
  using Scalar = std::complex<T>;
  using Vector = Eigen::Matrix<Scalar, 9, 1>;

  Vector c = Vector::Zero();
  bool restricted = false;

  BasisCoefficients() = default;
  explicit BasisCoefficients(const Vector& v, bool restricted_ = false) : c(v), restricted(restricted_) {
    if (restricted) c.template tail<4>().setZero();
  }

  static BasisCoefficients unit(int index) {
    BasisCoefficients b;
    b.c(index - 1) = 1;
    b.restricted = index <= 5;
    return b;
  }

  static BasisCoefficients restricted_from(const Scalar& c1, const Scalar& c2, const Scalar& c3,
                                           const Scalar& c4, const Scalar& c5) {
    Vector v = Vector::Zero();
    v << c1, c2, c3, c4, c5, 0, 0, 0, 0;
    return BasisCoefficients(v, true);
  }

  // 1-based access matching J1..J9
  Scalar& operator()(int index) { return c(index - 1); }
  const Scalar& operator()(int index) const { return c(index - 1); }
};

template <typename T>
Matrix3c<T> realize(const BasisCoefficients<T>& a, const SpectralPoint<T>& p) {
  Matrix3c<T> m = Matrix3c<T>::Zero();
  for (int i = 1; i <= 9; ++i)
    if (a(i) != std::complex<T>(0)) m += a(i) * basis_matrix<T>(i, p);
  return m;
}

// sqrt(sum |c_i|^2 ||J_i||_F^2): the size of each term as it appears in the realized matrix
template <typename T>
T weighted_norm(const BasisCoefficients<T>& a, const SpectralPoint<T>& p) {
  T s = 0;
  for (int i = 1; i <= 9; ++i) s += std::norm(a(i)) * basis_matrix<T>(i, p).squaredNorm();
  return std::sqrt(s);
}

template <typename T>
T weighted_distance(const BasisCoefficients<T>& a, const BasisCoefficients<T>& b, const SpectralPoint<T>& p) {
  BasisCoefficients<T> d;
  d.c = a.c - b.c;
  return weighted_norm(d, p);
}

namespace detail {

struct ProductTerm {
  int w;      // result basis index, 0 = unused
  double c0;  // coefficient is c0 + c1 * k_rho^2
  double c1;
};

struct ProductCell {
  ProductTerm t[2];
};

// J_u J_v for u, v in 1..9 (row u, column v)
inline const std::array<std::array<ProductCell, 9>, 9>& product_table() {
  static const std::array<std::array<ProductCell, 9>, 9> table = [] {
    std::array<std::array<ProductCell, 9>, 9> t{};
    auto set = [&](int u, int v, ProductTerm a, ProductTerm b = {0, 0, 0}) {
      t[u - 1][v - 1] = ProductCell{{a, b}};
    };
    set(1, 1, {1, 1, 0}); set(1, 3, {3, 1, 0}); set(1, 5, {5, 1, 0});
    set(1, 7, {7, 1, 0}); set(1, 8, {8, 1, 0}); set(1, 9, {9, 1, 0});

    set(2, 2, {2, 1, 0}); set(2, 4, {4, 1, 0}); set(2, 6, {6, 1, 0});

    set(3, 2, {3, 1, 0}); set(3, 4, {5, 1, 0}); set(3, 6, {8, 1, 0}, {9, 0, -1});

    set(4, 1, {4, 1, 0}); set(4, 3, {2, 0, -1}); set(4, 5, {4, 0, -1}); set(4, 9, {6, 1, 0});

    set(5, 1, {5, 1, 0}); set(5, 3, {3, 0, -1}); set(5, 5, {5, 0, -1}); set(5, 9, {8, 1, 0}, {9, 0, -1});

    set(6, 1, {6, 1, 0}); set(6, 7, {2, 0, 1}); set(6, 8, {4, 0, -1}); set(6, 9, {4, -1, 0});

    set(7, 2, {7, 1, 0}); set(7, 4, {8, -1, 0}); set(7, 6, {1, 0, 1}, {5, 1, 0});

    set(8, 1, {8, 1, 0}); set(8, 3, {7, 0, 1}); set(8, 5, {8, 0, -1}); set(8, 9, {1, 0, -1}, {5, -1, 0});

    set(9, 1, {9, 1, 0}); set(9, 3, {7, 1, 0}); set(9, 5, {8, -1, 0}); set(9, 7, {3, -1, 0});
    set(9, 8, {5, 1, 0}); set(9, 9, {1, -1, 0});
    return t;
  }();
  return table;
}

// realized products at a fixed generic point must match the table
inline double product_table_residual(double kx, double ky, int u, int v) {
  const SpectralPoint<double> p(kx, ky);
  const double r = p.k_rho_sq();
  Mat3 predicted = Mat3::Zero();
  for (const ProductTerm& term : product_table()[u - 1][v - 1].t)
    if (term.w) predicted += (term.c0 + term.c1 * r) * basis_matrix<double>(term.w, p);
  const Mat3 actual = basis_matrix<double>(u, p) * basis_matrix<double>(v, p);
  return (actual - predicted).cwiseAbs().maxCoeff();
}

inline bool product_table_verified() {
  static const bool ok = [] {
    for (int u = 1; u <= 9; ++u)
      for (int v = 1; v <= 9; ++v)
        if (product_table_residual(0.37, -0.81, u, v) > 1e-14) {
          std::fprintf(stderr, "lmgf: product table self-check failed at J%d J%d\n", u, v);
          return false;
        }
    return true;
  }();
  return ok;
}

}  // namespace detail

template <typename T>
BasisCoefficients<T> multiply_in_basis(const BasisCoefficients<T>& a, const BasisCoefficients<T>& b,
                                       const std::complex<T>& k_rho_sq) {
  if (!detail::product_table_verified()) std::abort();
  const auto& table = detail::product_table();
  const bool both_restricted = a.restricted && b.restricted;
  const int n = both_restricted ? 5 : 9;
  BasisCoefficients<T> out;
  for (int u = 1; u <= n; ++u) {
    if (a(u) == std::complex<T>(0)) continue;
    for (int v = 1; v <= n; ++v) {
      if (b(v) == std::complex<T>(0)) continue;
      const std::complex<T> ab = a(u) * b(v);
      for (const detail::ProductTerm& term : table[u - 1][v - 1].t)
        if (term.w) out(term.w) += ab * (T(term.c0) + T(term.c1) * k_rho_sq);
    }
  }
  out.restricted = both_restricted;
  return out;
}

template <typename T>
BasisCoefficients<T> decompose(const Matrix3c<T>& m, const SpectralPoint<T>& p, T eps_degenerate = T(1e-8)) {
  if (!(p.k_rho > eps_degenerate))
    throw Error(ErrorKind::DegenerateSpectralPoint, "k_rho too small for basis decomposition");
  using C = std::complex<T>;
  Eigen::Matrix<C, 9, 9> a;
  Eigen::Matrix<T, 9, 1> scale;
  for (int i = 1; i <= 9; ++i) {
    const Matrix3c<T> j = basis_matrix<T>(i, p);
    scale(i - 1) = j.norm();
    a.col(i - 1) = Eigen::Map<const Eigen::Matrix<C, 9, 1>>(j.data()) / scale(i - 1);
  }
  const Eigen::Matrix<C, 9, 1> rhs = Eigen::Map<const Eigen::Matrix<C, 9, 1>>(m.data());
  const Eigen::Matrix<C, 9, 1> y = a.partialPivLu().solve(rhs);
  BasisCoefficients<T> out;
  out.c = y.cwiseQuotient(scale.template cast<C>());
  return out;
}

// the vector basis j2, j3, j7: third columns of J2, J3, J7
template <typename T>
Vector3c<T> vector_basis(int index, const SpectralPoint<T>& p) {
  if (index != 2 && index != 3 && index != 7)
    throw Error(ErrorKind::InvalidArgument, "vector basis index must be 2, 3 or 7");
  return basis_matrix<T>(index, p).col(2);
}

template <typename T>
struct VectorBasisCoefficients {
  std::complex<T> c2{0}, c3{0}, c7{0};
};

template <typename T>
Vector3c<T> realize(const VectorBasisCoefficients<T>& a, const SpectralPoint<T>& p) {
  return a.c2 * vector_basis<T>(2, p) + a.c3 * vector_basis<T>(3, p) + a.c7 * vector_basis<T>(7, p);
}

template <typename T>
VectorBasisCoefficients<T> decompose_vector(const Vector3c<T>& v, const SpectralPoint<T>& p,
                                            T eps_degenerate = T(1e-8)) {
  if (!(p.k_rho > eps_degenerate))
    throw Error(ErrorKind::DegenerateSpectralPoint, "k_rho too small for vector decomposition");
  Matrix3c<T> a;
  a.col(0) = vector_basis<T>(2, p);
  a.col(1) = vector_basis<T>(3, p) / p.k_rho;
  a.col(2) = vector_basis<T>(7, p) / p.k_rho;
  const Vector3c<T> y = a.partialPivLu().solve(v);
  return {y(0), y(1) / p.k_rho, y(2) / p.k_rho};
}

}  // namespace lmgf
