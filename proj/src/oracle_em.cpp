#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "lmgf/errors.hpp"
#include "lmgf/oracle.hpp"

namespace lmgf {

namespace detail {

LeastSquares solve_dense(Eigen::MatrixXcd m, Eigen::MatrixXcd rhs) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double s = m.row(i).cwiseAbs().maxCoeff();
    if (s == 0) continue;
    m.row(i) /= s;
    rhs.row(i) /= s;
  }
  LeastSquares out;
  if (m.cols() == 0) {
    out.x = Eigen::MatrixXcd::Zero(0, rhs.cols());
    out.condition = 1;
    return out;
  }
  // columns too, so small unknowns are not swamped by large ones
  Eigen::VectorXd col(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    col(j) = m.col(j).cwiseAbs().maxCoeff();
    if (col(j) == 0) col(j) = 1;
    m.col(j) /= col(j);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  out.condition = smin > 0 ? sv(0) / smin : INFINITY;
  if (!(smin > 1e-14 * sv(0))) throw Error(ErrorKind::SingularSystem, "oracle system is rank deficient");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd y = qr.solve(rhs);
  y += qr.solve(Eigen::MatrixXcd(rhs - m * y));  // one refinement sweep
  const double nb = rhs.norm();
  out.residual = nb > 0 ? (m * y - rhs).norm() / nb : 0.0;
  out.x = col.cwiseInverse().asDiagonal() * y;
  return out;
}

}  // namespace detail

namespace {

using Vec = Eigen::Vector3cd;

// entrywise n . a without conjugation
cplx dot(const Vec& n, const Vec& a) { return n(0) * a(0) + n(1) * a(1) + n(2) * a(2); }

Vec electric(const Vec& a, const Vec& n, cplx k, double omega) { return -iu * omega * (a + n * (dot(n, a) / (k * k))); }
Vec magnetic(const Vec& a, const Vec& n, cplx mu) { return detail::cross(n, a) / mu; }

Vec symbol(const SpectralPoint<double>& p, cplx kz, double tau) { return Vec(iu * p.kx, iu * p.ky, tau * iu * kz); }

// the six entrywise interface quantities: E1, E2, eps E3, H1, H2, mu H3
Eigen::Matrix<cplx, 6, 1> traces(const Vec& a, const Vec& n, const EmLayer& L, double omega) {
  const Vec E = electric(a, n, L.k, omega), H = magnetic(a, n, L.mu);
  Eigen::Matrix<cplx, 6, 1> out;
  out << E(0), E(1), L.eps * E(2), H(0), H(1), L.mu * H(2);
  return out;
}

}  // namespace

Mat3 oracle_layer_tensor(const FullTensorSolution& s, int t, Direction d) {
  const LayerStack& st = s.stack;
  const double tau_ = tau(d);
  const double ref = d == Direction::Up ? st.up_reference(t) : st.down_reference(t);
  const Mat3& m = s.local.at(t)[static_cast<int>(d)];
  if (s.kind == ProblemKind::Maxwell) {
    const cplx kz = vertical_wavenumber(em_layer(st, t, s.omega).k, s.point.k_rho);
    return m * std::exp(-tau_ * iu * kz * ref);
  }
  const ElasticLayer L = elastic_layer(st, t, s.omega);
  if (L.phase == Phase::Vacuum) return Mat3::Zero();
  const cplx ec = std::exp(-tau_ * iu * vertical_wavenumber(L.kc, s.point.k_rho) * ref);
  if (L.phase == Phase::Fluid) return m * ec;
  const cplx es = std::exp(-tau_ * iu * vertical_wavenumber(L.ks, s.point.k_rho) * ref);
  Mat3 out = m;
  out.row(0) *= es;
  out.row(1) *= es;
  out.row(2) *= ec;
  return out;
}

FullTensorSolution oracle_em_full(const LayerStack& stack, double omega, const SpectralPoint<double>& p, double z_src) {
  if (stack.kind() != ProblemKind::Maxwell) throw Error(ErrorKind::InvalidStack, "EM oracle needs an EM stack");
  FullTensorSolution s{stack, omega, p, z_src, stack.locate(z_src), ProblemKind::Maxwell, SourceKind::Tensor, {}, 0, 0};
  const int nl = stack.num_layers();
  std::vector<EmLayer> L;
  std::vector<cplx> kz;
  for (int t = 0; t < nl; ++t) {
    L.push_back(em_layer(stack, t, omega));
    kz.push_back(vertical_wavenumber(L.back().k, p.k_rho));
  }

  // unknown blocks (3 columns each) for every allowed (layer, direction)
  std::vector<std::array<int, 2>> block(nl, {-1, -1});
  int nb = 0;
  for (int t = 0; t < nl; ++t) {
    if (t > 0) block[t][1] = nb++;
    if (t < nl - 1) block[t][0] = nb++;
  }
  const int n = 3 * nb;
  const int rows = 6 * stack.num_interfaces() + nb;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, n);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(rows, 3);

  const int j = s.source_layer;
  const cplx free_amp = -1.0 / (2.0 * omega * kz[j]);
  for (int l = 0; l < stack.num_interfaces(); ++l) {
    const double d = stack.interface(l);
    for (int side = 0; side < 2; ++side) {
      const int t = l + side;
      const double sign = side == 0 ? 1.0 : -1.0;
      for (int dir = 0; dir < 2; ++dir) {
        const int b = block[t][dir];
        if (b < 0) continue;
        const double tau_ = dir == 0 ? 1.0 : -1.0;
        const double ref = dir == 0 ? stack.up_reference(t) : stack.down_reference(t);
        const Vec nvec = symbol(p, kz[t], tau_);
        const cplx e = std::exp(tau_ * iu * kz[t] * (d - ref));
        for (int c = 0; c < 3; ++c)
          m.block(6 * l, 3 * b + c, 6, 1) += sign * e * traces(Vec::Unit(c), nvec, L[t], omega);
      }
      if (t == j) {
        const double tau_ = d > z_src ? 1.0 : -1.0;
        const Vec nvec = symbol(p, kz[j], tau_);
        const cplx e = std::exp(iu * kz[j] * std::abs(d - z_src));
        for (int c = 0; c < 3; ++c)
          rhs.block(6 * l, c, 6, 1) -= sign * free_amp * e * traces(Vec::Unit(c), nvec, L[t], omega);
      }
    }
  }
  // gauge: conj(n) . a = 0 removes the longitudinal part of each unknown
  int row = 6 * stack.num_interfaces();
  for (int t = 0; t < nl; ++t)
    for (int dir = 0; dir < 2; ++dir) {
      const int b = block[t][dir];
      if (b < 0) continue;
      const Vec nvec = symbol(p, kz[t], dir == 0 ? 1.0 : -1.0);
      for (int c = 0; c < 3; ++c) m(row, 3 * b + c) = std::conj(nvec(c));
      ++row;
    }

  const detail::LeastSquares ls = detail::solve_dense(m, rhs);
  s.condition = ls.condition;
  s.residual = ls.residual;
  s.local.assign(nl, {Mat3::Zero(), Mat3::Zero()});
  for (int t = 0; t < nl; ++t)
    for (int dir = 0; dir < 2; ++dir)
      if (block[t][dir] >= 0) s.local[t][dir] = ls.x.block(3 * block[t][dir], 0, 3, 3);
  return s;
}

namespace {

template <class F>
Mat3 em_field(const FullTensorSolution& s, double z, int t, F&& field) {
  const LayerStack& st = s.stack;
  const EmLayer L = em_layer(st, t, s.omega);
  const cplx kz = vertical_wavenumber(L.k, s.point.k_rho);
  Mat3 out = Mat3::Zero();
  for (int dir = 0; dir < 2; ++dir) {
    const double tau_ = dir == 0 ? 1.0 : -1.0;
    const double ref = dir == 0 ? st.up_reference(t) : st.down_reference(t);
    const Vec nvec = symbol(s.point, kz, tau_);
    const cplx e = std::exp(tau_ * iu * kz * (z - ref));
    for (int c = 0; c < 3; ++c) out.col(c) += e * field(Vec(s.local[t][dir].col(c)), nvec, L);
  }
  if (t == s.source_layer) {
    if (std::abs(z - s.z_src) <= st.eps_iface()) throw Error(ErrorKind::CoincidentDepths, "z coincides with z'");
    const Vec nvec = symbol(s.point, kz, z > s.z_src ? 1.0 : -1.0);
    const cplx a = -1.0 / (2.0 * s.omega * kz) * std::exp(iu * kz * std::abs(z - s.z_src));
    for (int c = 0; c < 3; ++c) out.col(c) += field(Vec(a * Vec::Unit(c)), nvec, L);
  }
  return out;
}

}  // namespace

Mat3 oracle_em_ge(const FullTensorSolution& s, double z, int t) {
  return em_field(s, z, t, [&](const Vec& a, const Vec& n, const EmLayer& L) { return electric(a, n, L.k, s.omega); });
}

Mat3 oracle_em_gh(const FullTensorSolution& s, double z, int t) {
  return em_field(s, z, t, [](const Vec& a, const Vec& n, const EmLayer& L) { return magnetic(a, n, L.mu); });
}

cplx oracle_halfspace_reflection(HalfspaceMode mode, const Material& upper, const Material& lower, double omega,
                                 double k_rho, double loss) {
  const cplx f(1.0, loss);
  // (k, weight on the value, weight on the derivative) per side
  auto side = [&](const Material& m, cplx& k, cplx& wv, cplx& wd) {
    if (mode == HalfspaceMode::Acoustic) {
      const auto& e = std::get<ElasticMaterial>(m);
      k = elastic_wavenumbers(e, omega, loss).kc;
      wv = e.rho * f * f;  // pressure ~ rho * potential
      wd = 1.0;
    } else {
      const auto& e = std::get<EmMaterial>(m);
      k = em_wavenumber(e, omega, loss);
      wv = 1.0;
      wd = mode == HalfspaceMode::TE ? 1.0 / cplx(e.mu) : 1.0 / (e.eps * f * f);
    }
  };
  cplx k0, v0, d0;
  side(upper, k0, v0, d0);
  const cplx kz0 = vertical_wavenumber(k0, k_rho);
  if (std::holds_alternative<Vacuum>(lower)) return mode == HalfspaceMode::Acoustic ? cplx(-1.0) : cplx(0.0);
  cplx k1, v1, d1;
  side(lower, k1, v1, d1);
  const cplx kz1 = vertical_wavenumber(k1, k_rho);
  // upper: exp(-i kz0 z) + R exp(i kz0 z); lower: T exp(-i kz1 z); unknowns (R, T)
  Eigen::Matrix2cd m;
  Eigen::Vector2cd b;
  m << v0, -v1, d0 * iu * kz0, d1 * iu * kz1;
  b << -v0, d0 * iu * kz0;
  const Eigen::Vector2cd x = m.fullPivLu().solve(b);
  return x(0);
}

}  // namespace lmgf
