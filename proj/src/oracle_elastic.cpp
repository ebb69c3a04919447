#include <cmath>

#include "lmgf/errors.hpp"
#include "lmgf/oracle.hpp"

namespace lmgf {

namespace {

using Vec = Eigen::Vector3cd;

struct Medium {
  Phase phase = Phase::Vacuum;
  cplx rho{0};
  double lambda = 0, mu = 0;
  cplx ksz{0}, kcz{0};
  double gamma() const { return lambda + 2 * mu; }
};

// one exponential term a exp(s z) of the displacement column
struct Wave {
  Vec a;
  cplx s;
};

// rows u1, u2, u3, T31, T32, T33 of a single wave
Eigen::Matrix<cplx, 6, 1> quantities(const Wave& w, const Medium& m, const SpectralPoint<double>& p) {
  const cplx ikx = iu * p.kx, iky = iu * p.ky;
  Eigen::Matrix<cplx, 6, 1> q;
  q << w.a(0), w.a(1), w.a(2), m.mu * (ikx * w.a(2) + w.s * w.a(0)), m.mu * (iky * w.a(2) + w.s * w.a(1)),
      m.lambda * (ikx * w.a(0) + iky * w.a(1)) + m.gamma() * w.s * w.a(2);
  return q;
}

// the waves generated by one unknown column in a layer, evaluated with unit exponential at the reference
std::vector<Wave> unknown_waves(const Vec& x, const Medium& m, const SpectralPoint<double>& p, double tau_) {
  const cplx ikx = iu * p.kx, iky = iu * p.ky;
  if (m.phase == Phase::Fluid) return {{x, tau_ * iu * m.kcz}};
  const cplx tks = tau_ * iu * m.ksz, tkc = tau_ * iu * m.kcz;
  // (-tau i ksz J1 + J4) x and (tau i kcz J2 + J3) x written out
  const Vec s(-tks * x(0), -tks * x(1), ikx * x(0) + iky * x(1));
  const Vec c(ikx * x(2), iky * x(2), tkc * x(2));
  return {{s, tks}, {c, tkc}};
}

// free-space field on the side tau of the source, split into its S and P waves and
// referenced at z'; a is one column per source orientation
std::vector<std::pair<Mat3, cplx>> free_waves(const Medium& m, const SpectralPoint<double>& p, double tau_,
                                              SourceKind kind, double omega) {
  const Vec nc(iu * p.kx, iu * p.ky, tau_ * iu * m.kcz);
  const cplx gc = iu / (2.0 * m.kcz);
  if (kind == SourceKind::Vector) {
    Mat3 a = Mat3::Zero();
    a.col(2) = nc * gc / (omega * omega * m.rho);
    return {{a, tau_ * iu * m.kcz}};
  }
  const Vec ns(iu * p.kx, iu * p.ky, tau_ * iu * m.ksz);
  const cplx ks2 = m.ksz * m.ksz + p.k_rho_sq(), kc2 = m.kcz * m.kcz + p.k_rho_sq();
  const cplx gs = iu / (2.0 * m.ksz);
  const Mat3 as = (Mat3::Identity() + ns * ns.transpose() / ks2) * (gs / m.mu);
  const Mat3 ac = -(nc * nc.transpose()) * (gc / (m.gamma() * kc2));
  return {{as, tau_ * iu * m.ksz}, {ac, tau_ * iu * m.kcz}};
}

Medium medium(const LayerStack& st, int t, double omega, double k_rho) {
  const ElasticLayer L = elastic_layer(st, t, omega);
  Medium m;
  m.phase = L.phase;
  if (L.phase == Phase::Vacuum) return m;
  m.rho = L.rho;
  m.lambda = L.lambda;
  m.mu = L.mu;
  m.kcz = vertical_wavenumber(L.kc, k_rho);
  if (L.phase == Phase::Solid) m.ksz = vertical_wavenumber(L.ks, k_rho);
  return m;
}

// (quantity index, upper side participates, lower side participates)
struct RowSpec {
  int q;
  bool upper, lower;
};

std::vector<RowSpec> interface_rows(Phase up, Phase lo) {
  const bool su = up == Phase::Solid, sl = lo == Phase::Solid;
  if (up == Phase::Vacuum || lo == Phase::Vacuum) {
    const bool upper = lo == Phase::Vacuum;
    const Phase m = upper ? up : lo;
    if (m == Phase::Solid) return {{3, upper, !upper}, {4, upper, !upper}, {5, upper, !upper}};
    return {{5, upper, !upper}};
  }
  if (su && sl) return {{0, true, true}, {1, true, true}, {2, true, true}, {3, true, true}, {4, true, true}, {5, true, true}};
  if (su || sl) return {{2, true, true}, {5, true, true}, {3, su, sl}, {4, su, sl}};
  return {{2, true, true}, {5, true, true}};
}

}  // namespace

FullTensorSolution oracle_elastic_full(const LayerStack& stack, double omega, const SpectralPoint<double>& p,
                                       double z_src, SourceKind kind) {
  if (stack.kind() != ProblemKind::Elastic) throw Error(ErrorKind::InvalidStack, "elastic oracle needs an elastic stack");
  FullTensorSolution s{stack, omega, p, z_src, stack.locate(z_src), ProblemKind::Elastic, kind, {}, 0, 0};
  const int nl = stack.num_layers();
  const int j = s.source_layer;
  std::vector<Medium> M;
  for (int t = 0; t < nl; ++t) M.push_back(medium(stack, t, omega, p.k_rho));
  if (kind == SourceKind::Tensor && M[j].phase != Phase::Solid)
    throw Error(ErrorKind::PhaseMismatch, "tensor source must sit in a solid");
  if (kind == SourceKind::Vector && M[j].phase != Phase::Fluid)
    throw Error(ErrorKind::PhaseMismatch, "vector source must sit in a fluid");

  std::vector<std::array<int, 2>> block(nl, {-1, -1});
  int nb = 0, constraint_rows = 0;
  for (int t = 0; t < nl; ++t) {
    if (M[t].phase == Phase::Vacuum) continue;
    for (int dir = 0; dir < 2; ++dir) {
      if ((t == 0 && dir == 1) || (t == nl - 1 && dir == 0)) continue;
      block[t][dir] = nb++;
      if (M[t].phase == Phase::Fluid) constraint_rows += 6;
    }
  }
  std::vector<std::vector<RowSpec>> specs;
  int rows = constraint_rows;
  for (int l = 0; l < stack.num_interfaces(); ++l) {
    specs.push_back(interface_rows(M[l].phase, M[l + 1].phase));
    rows += static_cast<int>(specs.back().size());
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, 3 * nb);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(rows, 3);

  int row = 0;
  for (int l = 0; l < stack.num_interfaces(); ++l) {
    const double d = stack.interface(l);
    for (const RowSpec& r : specs[l]) {
      for (int side = 0; side < 2; ++side) {
        if ((side == 0 && !r.upper) || (side == 1 && !r.lower)) continue;
        const int t = l + side;
        const double sign = (side == 1 && r.upper) ? -1.0 : 1.0;
        for (int dir = 0; dir < 2; ++dir) {
          const int b = block[t][dir];
          if (b < 0) continue;
          const double tau_ = dir == 0 ? 1.0 : -1.0;
          const double ref = dir == 0 ? stack.up_reference(t) : stack.down_reference(t);
          for (int c = 0; c < 3; ++c)
            for (const Wave& w : unknown_waves(Vec::Unit(c), M[t], p, tau_))
              m(row, 3 * b + c) += sign * std::exp(w.s * (d - ref)) * quantities(w, M[t], p)(r.q);
        }
        if (t == j) {
          const double tau_ = d > z_src ? 1.0 : -1.0;
          for (const auto& [a, sv] : free_waves(M[j], p, tau_, kind, omega))
            for (int c = 0; c < 3; ++c)
              rhs(row, c) -= sign * std::exp(sv * (d - z_src)) * quantities({a.col(c), sv}, M[j], p)(r.q);
        }
      }
      ++row;
    }
  }
  // fluid unknowns must be curl free and satisfy the acoustic equation
  for (int t = 0; t < nl; ++t)
    for (int dir = 0; dir < 2; ++dir) {
      const int b = block[t][dir];
      if (b < 0 || M[t].phase != Phase::Fluid) continue;
      const Vec n(iu * p.kx, iu * p.ky, (dir == 0 ? 1.0 : -1.0) * iu * M[t].kcz);
      for (int c = 0; c < 3; ++c) {
        const Vec g = Vec::Unit(c);
        const Vec curl = detail::cross(n, g);
        const cplx div = n(0) * g(0) + n(1) * g(1) + n(2) * g(2);
        const Vec acoustic = M[t].lambda * n * div + omega * omega * M[t].rho * g;
        m.block(row, 3 * b + c, 3, 1) = curl;
        m.block(row + 3, 3 * b + c, 3, 1) = acoustic;
      }
      // entries that cancel to roundoff must not survive row equilibration
      const double scale = std::abs(M[t].lambda * M[t].kcz * M[t].kcz) + p.k_rho_sq() * M[t].lambda +
                           std::abs(omega * omega * M[t].rho);
      for (int r = row + 3; r < row + 6; ++r)
        for (int c = 0; c < 3; ++c)
          if (std::abs(m(r, 3 * b + c)) < 1e-13 * scale) m(r, 3 * b + c) = 0;
      row += 6;
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

Mat3 oracle_elastic_g(const FullTensorSolution& s, double z, int t) {
  const LayerStack& st = s.stack;
  const Medium m = medium(st, t, s.omega, s.point.k_rho);
  Mat3 out = Mat3::Zero();
  if (m.phase == Phase::Vacuum) return out;
  for (int dir = 0; dir < 2; ++dir) {
    const double tau_ = dir == 0 ? 1.0 : -1.0;
    const double ref = dir == 0 ? st.up_reference(t) : st.down_reference(t);
    for (int c = 0; c < 3; ++c)
      for (const Wave& w : unknown_waves(s.local[t][dir].col(c), m, s.point, tau_))
        out.col(c) += w.a * std::exp(w.s * (z - ref));
  }
  if (t == s.source_layer) {
    if (std::abs(z - s.z_src) <= st.eps_iface()) throw Error(ErrorKind::CoincidentDepths, "z coincides with z'");
    for (const auto& [a, sv] : free_waves(m, s.point, z > s.z_src ? 1.0 : -1.0, s.source, s.omega))
      out += a * std::exp(sv * (z - s.z_src));
  }
  return out;
}

}  // namespace lmgf
