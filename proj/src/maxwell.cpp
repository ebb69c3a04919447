#include "lmgf/maxwell.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lmgf/banded.hpp"
#include "lmgf/errors.hpp"

namespace lmgf {

namespace {

double branch_tol(cplx k) { return 1e-8 * std::max(1.0, std::abs(k)); }

// -1/(2 omega kz), times 1/mu for the TM channels, times i kz s for b3
cplx free_amplitude(EmChannel c, double omega, cplx kz, cplx mu, double s) {
  cplx a = -1.0 / (2.0 * omega * kz);
  if (c != EmChannel::B1) a /= mu;
  if (c == EmChannel::B3) a *= iu * kz * s;
  return a;
}

}  // namespace

EmFreeSpaceB em_free_space_b(double omega, const EmMaterial& m, double k_rho, double z, double z_src, double loss) {
  if (z == z_src) throw Error(ErrorKind::CoincidentDepths, "free-space scalars need z != z'");
  const cplx k = em_wavenumber(m, omega, loss);
  const cplx kz = vertical_wavenumber(k, k_rho);
  if (std::abs(kz) < branch_tol(k)) throw Error(ErrorKind::BranchPoint, "kz vanishes");
  const double s = z > z_src ? 1.0 : -1.0;
  const cplx e = std::exp(iu * kz * std::abs(z - z_src));
  return {free_amplitude(EmChannel::B1, omega, kz, m.mu, s) * e, free_amplitude(EmChannel::B2, omega, kz, m.mu, s) * e,
          free_amplitude(EmChannel::B3, omega, kz, m.mu, s) * e};
}

EmSpectralSolution::EmSpectralSolution(const LayerStack& stack, double omega, double k_rho, double z_src)
    : stack_(stack), omega_(omega), k_rho_(k_rho), z_src_(z_src) {
  if (stack.kind() != ProblemKind::Maxwell) throw Error(ErrorKind::InvalidStack, "Maxwell solve needs an EM stack");
  if (!(omega > 0)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
  if (!(k_rho >= 0) || !std::isfinite(k_rho)) throw Error(ErrorKind::InvalidArgument, "k_rho must be >= 0");
  src_ = stack.locate(z_src);
  const int n = stack.num_layers();
  eps_degenerate_ = 1e-8 * std::max(1.0, stack.max_wavenumber(omega));
  for (int t = 0; t < n; ++t) {
    layers_.push_back(em_layer(stack, t, omega));
    kz_.push_back(vertical_wavenumber(layers_.back().k, k_rho));
  }
  if (std::abs(kz_[src_]) < branch_tol(layers_[src_].k))
    throw Error(ErrorKind::BranchPoint, "kz vanishes in the source layer");
  amp_.setZero(2 * n, 3);
}

int EmSpectralSolution::layer_of(double z) const { return stack_.locate(z); }

cplx EmSpectralSolution::amplitude(EmChannel c, int t, Direction d) const {
  return amp_(2 * t + static_cast<int>(d), static_cast<int>(c));
}

cplx EmSpectralSolution::reaction_coefficient(EmChannel c, int t, Direction d) const {
  const cplx a = amplitude(c, t, d);
  if (d == Direction::Up) return a * std::exp(-iu * kz_[t] * stack_.up_reference(t));
  return a * std::exp(iu * kz_[t] * stack_.down_reference(t));
}

Jet EmSpectralSolution::reaction(EmChannel c, double z, int t) const {
  const cplx kz = kz_[t];
  const cplx up = amplitude(c, t, Direction::Up) * std::exp(iu * kz * (z - stack_.up_reference(t)));
  const cplx dn = amplitude(c, t, Direction::Down) * std::exp(-iu * kz * (z - stack_.down_reference(t)));
  Jet j;
  j.v = up + dn;
  j.dz = iu * kz * (up - dn);
  j.dzz = -kz * kz * j.v;
  return j;
}

Jet EmSpectralSolution::free_part(EmChannel c, double z) const {
  if (std::abs(z - z_src_) <= stack_.eps_iface())
    throw Error(ErrorKind::CoincidentDepths, "target depth coincides with the source");
  const cplx kz = kz_[src_];
  const double s = z > z_src_ ? 1.0 : -1.0;
  Jet j;
  j.v = free_amplitude(c, omega_, kz, layers_[src_].mu, s) * std::exp(iu * kz * std::abs(z - z_src_));
  j.dz = iu * kz * s * j.v;
  j.dzz = -kz * kz * j.v;
  return j;
}

Jet EmSpectralSolution::total(EmChannel c, double z, int t) const {
  Jet j = reaction(c, z, t);
  if (t == src_) j += free_part(c, z);
  return j;
}

Jet EmSpectralSolution::total(EmChannel c, double z) const { return total(c, z, layer_of(z)); }

void EmSpectralSolution::perturb(double relative, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < amp_.rows(); ++i)
    for (int c = 0; c < amp_.cols(); ++c) {
      const double scale = std::max(std::abs(amp_(i, c)), 1e-300);
      if (amp_(i, c) != cplx(0)) amp_(i, c) += relative * scale * cplx(u(rng), u(rng));
    }
}

EmSpectralSolution solve_em_spectral(const LayerStack& stack, double omega, double k_rho, double z_src) {
  EmSpectralSolution sol(stack, omega, k_rho, z_src);
  const int nl = stack.num_layers();
  const int n = 2 * nl;
  const int j = sol.source_layer();
  using Dense = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

  Eigen::Matrix<cplx, Eigen::Dynamic, 3> amp = Eigen::Matrix<cplx, Eigen::Dynamic, 3>::Zero(n, 3);

  // TE system uses mu, TM (b2 and b3) uses eps
  for (int system = 0; system < 2; ++system) {
    Dense m = Dense::Zero(n, n);
    Eigen::Matrix<cplx, Eigen::Dynamic, 2> rhs = Eigen::Matrix<cplx, Eigen::Dynamic, 2>::Zero(n, 2);
    const EmChannel channels[2] = {system == 0 ? EmChannel::B1 : EmChannel::B2, EmChannel::B3};
    const int nrhs = system == 0 ? 1 : 2;
    auto coef = [&](int t) { return system == 0 ? sol.layer(t).mu : sol.layer(t).eps; };

    m(0, 1) = 1.0;          // nothing comes down from +infinity
    m(n - 1, n - 2) = 1.0;  // nothing comes up from -infinity
    for (int l = 0; l + 1 < nl; ++l) {
      const double d = stack.interface(l);
      const int rv = 2 * l + 1, rf = 2 * l + 2;
      for (int side = 0; side < 2; ++side) {
        const int t = l + side;
        const double sign = side == 0 ? 1.0 : -1.0;
        const cplx kz = sol.kz(t);
        const cplx eu = std::exp(iu * kz * (d - stack.up_reference(t)));
        const cplx ed = std::exp(-iu * kz * (d - stack.down_reference(t)));
        const cplx p = 1.0 / coef(t);
        m(rv, 2 * t) += sign * eu;
        m(rv, 2 * t + 1) += sign * ed;
        m(rf, 2 * t) += sign * p * iu * kz * eu;
        m(rf, 2 * t + 1) -= sign * p * iu * kz * ed;
        if (t == j)
          for (int r = 0; r < nrhs; ++r) {
            const Jet f = sol.free_part(channels[r], d);
            rhs(rv, r) -= sign * f.v;
            rhs(rf, r) -= sign * p * f.dz;
          }
      }
    }
    for (int r = 0; r < n; ++r) {
      const double s = m.row(r).cwiseAbs().maxCoeff();
      m.row(r) /= s;
      rhs.row(r) /= s;
    }
    const BandedLU<cplx> lu(m);
    for (int r = 0; r < nrhs; ++r) {
      const Vector x = lu.solve(rhs.col(r));
      amp.col(static_cast<int>(channels[r])) = x;
    }
  }
  // radiation zeros are exact
  amp(1, 0) = amp(1, 1) = amp(1, 2) = 0;
  amp(n - 2, 0) = amp(n - 2, 1) = amp(n - 2, 2) = 0;
  sol.amp_ = amp;
  return sol;
}

Mat3 realize_stable(const BasisCoefficients<double>& c, cplx n5, cplx n8, const SpectralPoint<double>& p) {
  Mat3 m = Mat3::Zero();
  for (int i = 1; i <= 9; ++i) {
    if (i == 5 || i == 8 || c(i) == cplx(0)) continue;
    m += c(i) * basis_matrix<double>(i, p);
  }
  if (n5 != cplx(0)) m += n5 * basis_matrix_normalized<double>(5, p.alpha);
  if (n8 != cplx(0)) m += n8 * basis_matrix_normalized<double>(8, p.alpha);
  return m;
}

namespace {

void check_point(const EmSpectralSolution& sol, const SpectralPoint<double>& p) {
  if (std::abs(p.k_rho - sol.k_rho()) > 1e-12 * std::max(1.0, sol.k_rho()))
    throw Error(ErrorKind::InvalidArgument, "spectral point does not match the solved k_rho");
}

cplx over_k_rho_sq(const EmSpectralSolution& sol, cplx n) {
  if (sol.k_rho() <= sol.eps_degenerate()) return {NAN, NAN};
  return n / (sol.k_rho() * sol.k_rho());
}

}  // namespace

AssembledTensor assemble_ge(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z, int t) {
  check_point(sol, p);
  const EmLayer& L = sol.layer(t);
  const double w = sol.omega(), r = sol.k_rho() * sol.k_rho();
  const cplx k2 = L.k * L.k;
  const cplx pre = -iu * w / k2;
  const Jet b1 = sol.total(EmChannel::B1, z, t);
  const Jet b2 = sol.total(EmChannel::B2, z, t);
  const Jet b3 = sol.total(EmChannel::B3, z, t);
  const Jet b1r = sol.reaction(EmChannel::B1, z, t);
  const Jet b3r = sol.reaction(EmChannel::B3, z, t);

  AssembledTensor out;
  out.n5 = pre * (k2 * b1r.v + L.mu * b3r.dz);
  // free part of k^2 b1 + mu d/dz b3 is exactly k_rho^2 b1
  if (t == sol.source_layer()) out.n5 += pre * r * sol.free_part(EmChannel::B1, z).v;
  out.coeffs = BasisCoefficients<double>::restricted_from(-iu * w * b1.v, pre * L.mu * r * b2.v, pre * L.mu * b2.dz,
                                                          pre * L.mu * b3.v, over_k_rho_sq(sol, out.n5));
  out.matrix = realize_stable(out.coeffs, out.n5, 0.0, p);
  return out;
}

AssembledTensor assemble_ge(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z) {
  return assemble_ge(sol, p, z, sol.layer_of(z));
}

AssembledTensor assemble_gh(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z, int t) {
  check_point(sol, p);
  const cplx mu = sol.layer(t).mu;
  const Jet b1 = sol.total(EmChannel::B1, z, t);
  const Jet b2 = sol.total(EmChannel::B2, z, t);
  const Jet b1r = sol.reaction(EmChannel::B1, z, t);
  const Jet b3r = sol.reaction(EmChannel::B3, z, t);

  AssembledTensor out;
  // the free parts of d/dz b1 and mu b3 cancel exactly
  out.n8 = (b1r.dz - mu * b3r.v) / mu;
  out.coeffs(6) = b1.v / mu;
  out.coeffs(7) = b2.v;
  out.coeffs(8) = over_k_rho_sq(sol, out.n8);
  out.coeffs(9) = -b1.dz / mu;
  out.matrix = realize_stable(out.coeffs, 0.0, out.n8, p);
  return out;
}

AssembledTensor assemble_gh(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z) {
  return assemble_gh(sol, p, z, sol.layer_of(z));
}

namespace {

struct PotentialParts {
  int t;
  cplx mu, kz;
  double r;
  Jet b1, b2, b1r, b3r;
};

PotentialParts potential_parts(const EmSpectralSolution& sol, double z) {
  if (sol.k_rho() <= sol.eps_degenerate())
    throw Error(ErrorKind::DegenerateSpectralPoint, "potential recovery divides by k_rho^2");
  PotentialParts q;
  q.t = sol.layer_of(z);
  q.mu = sol.layer(q.t).mu;
  q.kz = sol.kz(q.t);
  if (std::abs(q.kz) < 1e-8 * std::max(1.0, std::abs(sol.layer(q.t).k)))
    throw Error(ErrorKind::BranchPoint, "potential recovery divides by kz^2");
  q.r = sol.k_rho() * sol.k_rho();
  q.b1 = sol.total(EmChannel::B1, z, q.t);
  q.b2 = sol.total(EmChannel::B2, z, q.t);
  q.b1r = sol.reaction(EmChannel::B1, z, q.t);
  q.b3r = sol.reaction(EmChannel::B3, z, q.t);
  return q;
}

void set_common(PotentialJet& a, const PotentialParts& q) {
  a.v(1) = q.b1.v;
  a.dz(1) = q.b1.dz;
  a.dzz(1) = q.b1.dzz;
  a.v(2) = q.mu * q.b2.v;
  a.dz(2) = q.mu * q.b2.dz;
  a.dzz(2) = q.mu * q.b2.dzz;
  a.v.restricted = a.dz.restricted = a.dzz.restricted = true;
}

}  // namespace

// free parts drop out of a5 and a4 exactly, so only reaction terms enter them
PotentialJet transverse_potential(const EmSpectralSolution& sol, double z) {
  const PotentialParts q = potential_parts(sol, z);
  PotentialJet a;
  set_common(a, q);
  a.v(5) = (q.b1r.v + q.mu * q.b3r.dz / (q.kz * q.kz)) / q.r;
  a.dz(5) = (q.b1r.dz - q.mu * q.b3r.v) / q.r;
  a.dzz(5) = (q.b1r.dzz - q.mu * q.b3r.dz) / q.r;
  return a;
}

PotentialJet sommerfeld_potential(const EmSpectralSolution& sol, double z) {
  const PotentialParts q = potential_parts(sol, z);
  PotentialJet a;
  set_common(a, q);
  a.v(4) = (q.mu * q.b3r.v - q.b1r.dz) / q.r;
  a.dz(4) = (q.mu * q.b3r.dz - q.b1r.dzz) / q.r;
  a.dzz(4) = -q.kz * q.kz * a.v(4);
  return a;
}

BasisCoefficients<double> apply_electric_operator(const PotentialJet& a, cplx k, double omega, double k_rho) {
  using B = BasisCoefficients<double>;
  const cplx r = k_rho * k_rho;
  const B grad = B(multiply_in_basis(B::unit(5), a.v, r).c + multiply_in_basis(B::unit(3), a.dz, r).c +
                       multiply_in_basis(B::unit(4), a.dz, r).c + multiply_in_basis(B::unit(2), a.dzz, r).c,
                   a.v.restricted);
  return B((-iu * omega) * (a.v.c + grad.c / (k * k)), a.v.restricted);
}

std::vector<InterfaceResidual> em_interface_residuals(const EmSpectralSolution& sol, const SpectralPoint<double>& p) {
  using B = BasisCoefficients<double>;
  if (sol.k_rho() <= sol.eps_degenerate())
    throw Error(ErrorKind::DegenerateSpectralPoint, "residuals are compared in basis coefficients");
  const LayerStack& stack = sol.stack();
  const cplx r = sol.k_rho() * sol.k_rho();
  std::vector<InterfaceResidual> out;
  for (int l = 0; l < stack.num_interfaces(); ++l) {
    const double d = stack.interface(l);
    B sides[2][4];
    for (int s = 0; s < 2; ++s) {
      const int t = l + s;
      const B ge = assemble_ge(sol, p, d, t).coeffs;
      const B gh = assemble_gh(sol, p, d, t).coeffs;
      sides[s][0] = multiply_in_basis(B::unit(1), ge, r);
      sides[s][1] = multiply_in_basis(B::unit(2), ge, r);
      sides[s][1].c *= sol.layer(t).eps;
      sides[s][2] = multiply_in_basis(B::unit(9), gh, r);
      sides[s][3] = multiply_in_basis(B::unit(7), gh, r);
      sides[s][3].c *= sol.layer(t).mu;
    }
    InterfaceResidual res;
    res.interface = l;
    for (int q = 0; q < 4; ++q) {
      const double scale = std::max(weighted_norm(sides[0][q], p), weighted_norm(sides[1][q], p));
      const double diff = weighted_distance(sides[0][q], sides[1][q], p);
      res.max_relative = std::max(res.max_relative, scale > 0 ? diff / scale : diff);
    }
    out.push_back(res);
  }
  return out;
}

}  // namespace lmgf
