#pragma once

// Banded LU with partial pivoting in LAPACK gbtrf band storage.
// A(i, j) lives at ab(kl + ku + i - j, j); the extra kl rows hold fill-in.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lmgf/errors.hpp"

namespace lmgf {

template <typename Scalar>
class BandedLU {
public:
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // pivots smaller than pivot_tol times the largest row entry are treated as singular
  explicit BandedLU(const Dense& a, double pivot_tol = 1e-13) : n_(static_cast<int>(a.rows())) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "banded solve needs a square matrix");
    kl_ = ku_ = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (a(i, j) != Scalar(0)) {
          kl_ = std::max(kl_, i - j);
          ku_ = std::max(ku_, j - i);
        }
    ab_ = Dense::Zero(2 * kl_ + ku_ + 1, n_);
    for (int j = 0; j < n_; ++j)
      for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) at(i, j) = a(i, j);
    double amax = 0;
    for (int i = 0; i < n_; ++i) amax = std::max(amax, static_cast<double>(a.row(i).cwiseAbs().maxCoeff()));
    factor(pivot_tol * amax);
  }

  int lower_bandwidth() const { return kl_; }
  int upper_bandwidth() const { return ku_; }
  double min_pivot() const { return min_pivot_; }

  Vector solve(const Vector& b) const {
    Vector x = b;
    const int kv = kl_ + ku_;
    for (int j = 0; j < n_; ++j) {
      if (ipiv_[j] != j) std::swap(x(j), x(ipiv_[j]));
      const int km = std::min(kl_, n_ - 1 - j);
      for (int r = 1; r <= km; ++r) x(j + r) -= at(j + r, j) * x(j);
    }
    for (int j = n_ - 1; j >= 0; --j) {
      x(j) /= at(j, j);
      for (int i = std::max(0, j - kv); i < j; ++i) x(i) -= at(i, j) * x(j);
    }
    return x;
  }

private:
  Scalar& at(int i, int j) { return ab_(kl_ + ku_ + i - j, j); }
  const Scalar& at(int i, int j) const { return ab_(kl_ + ku_ + i - j, j); }

  void factor(double singular_tol) {
    ipiv_.assign(n_, 0);
    min_pivot_ = n_ ? INFINITY : 0.0;
    int ju = 0;
    for (int j = 0; j < n_; ++j) {
      const int km = std::min(kl_, n_ - 1 - j);
      int jp = 0;
      double best = -1;
      for (int r = 0; r <= km; ++r) {
        const double v = std::abs(at(j + r, j));
        if (v > best) { best = v; jp = r; }
      }
      ipiv_[j] = j + jp;
      min_pivot_ = std::min(min_pivot_, best);
      if (!(best > singular_tol)) throw Error(ErrorKind::SingularSystem, "zero pivot in banded factorization");
      ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
      if (jp != 0)
        for (int c = j; c <= ju; ++c) std::swap(at(j + jp, c), at(j, c));
      const Scalar piv = at(j, j);
      for (int r = 1; r <= km; ++r) at(j + r, j) /= piv;
      for (int c = j + 1; c <= ju; ++c) {
        const Scalar u = at(j, c);
        if (u == Scalar(0)) continue;
        for (int r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * u;
      }
    }
  }

  int n_;
  int kl_ = 0, ku_ = 0;
  Dense ab_;
  std::vector<int> ipiv_;
  double min_pivot_ = 0;
};

}  // namespace lmgf
