#include "lmgf/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lmgf/banded.hpp"
#include "lmgf/errors.hpp"

namespace lmgf {

namespace {

double branch_tol(cplx k) { return 1e-8 * std::max(1.0, std::abs(k)); }

bool is_p_slot(int slot) { return slot == 2 || slot == 4; }

// contribution of one wave term (unit amplitude, exponential factor e) to T1..T10
std::array<cplx, 10> traction_row(const ElasticLayer& L, double omega, cplx ksz, cplx kcz, double r, int slot,
                                  double tau, cplx e) {
  std::array<cplx, 10> T{};
  if (L.phase == Phase::Fluid) {
    const cplx w2rho = omega * omega * L.rho;
    if (slot == 2) {
      T[0] = -w2rho * e;
      T[2] = tau * iu * kcz * e;
    } else if (slot == 4) {
      T[1] = -w2rho * e;
      T[3] = tau * iu * kcz * e;
    }
    return T;
  }
  const double mu = L.mu, lam = L.lambda, gam = L.gamma();
  const cplx tks = tau * iu * ksz, tkc = tau * iu * kcz;
  const cplx pp = -lam * r - gam * kcz * kcz;
  switch (slot) {
    case 1:
      T[1] = 2 * mu * tks * e;
      T[3] = e;
      T[4] = mu * ksz * ksz * e;
      T[6] = mu * e;
      T[7] = -tks * e;
      break;
    case 3:
      T[0] = -2 * mu * tks * r * e;
      T[2] = -r * e;
      T[5] = mu * (ksz * ksz - r) * e;
      T[8] = -tks * e;
      break;
    case 5:
      T[1] = -2 * mu * tks * r * e;
      T[3] = -r * e;
      T[6] = mu * (ksz * ksz - r) * e;
      T[9] = -tks * e;
      break;
    case 2:
      T[0] = pp * e;
      T[2] = tkc * e;
      T[5] = 2 * mu * tkc * e;
      T[8] = e;
      break;
    case 4:
      T[1] = pp * e;
      T[3] = tkc * e;
      T[6] = 2 * mu * tkc * e;
      T[9] = e;
      break;
  }
  return T;
}

enum class Side { Both, Upper, Lower };

struct Condition {
  int T;  // 1-based
  Side side;
};

// conditions at the interface between an upper and a lower layer, split by unknown group
void interface_conditions(Phase up, Phase lo, std::vector<Condition>& a, std::vector<Condition>& b) {
  a.clear();
  b.clear();
  auto both = [](std::initializer_list<int> ts, std::vector<Condition>& out) {
    for (int t : ts) out.push_back({t, Side::Both});
  };
  const bool solid_up = up == Phase::Solid, solid_lo = lo == Phase::Solid;
  if (up == Phase::Vacuum || lo == Phase::Vacuum) {
    const Side s = up == Phase::Vacuum ? Side::Lower : Side::Upper;
    const Phase m = up == Phase::Vacuum ? lo : up;
    if (m == Phase::Solid) {
      for (int t : {2, 5, 7}) a.push_back({t, s});
      for (int t : {1, 6}) b.push_back({t, s});
    } else {
      a.push_back({2, s});
      b.push_back({1, s});
    }
    return;
  }
  if (solid_up && solid_lo) {
    both({2, 4, 5, 7, 8, 10}, a);
    both({1, 3, 6, 9}, b);
  } else if (solid_up || solid_lo) {
    const Side s = solid_up ? Side::Upper : Side::Lower;
    both({2, 4}, a);
    a.push_back({5, s});
    a.push_back({7, s});
    both({1, 3}, b);
    b.push_back({6, s});
  } else {
    both({2, 4}, a);
    both({1, 3}, b);
  }
}

bool in_group(int slot, Phase ph, bool group_a) {
  if (ph == Phase::Vacuum) return false;
  if (ph == Phase::Fluid) return group_a ? slot == 4 : slot == 2;
  return group_a ? (slot == 1 || slot == 4 || slot == 5) : (slot == 2 || slot == 3);
}

}  // namespace

ElasticFreeSpace elastic_free_space_coeffs(double omega, const ElasticMaterial& m, double k_rho, Direction d,
                                           double loss) {
  if (m.phase() != Phase::Solid) throw Error(ErrorKind::PhaseMismatch, "free-space tensor needs a solid");
  const ElasticWavenumbers k = elastic_wavenumbers(m, omega, loss);
  const cplx ksz = vertical_wavenumber(*k.ks, k_rho), kcz = vertical_wavenumber(k.kc, k_rho);
  if (std::abs(ksz) < branch_tol(*k.ks) || std::abs(kcz) < branch_tol(k.kc))
    throw Error(ErrorKind::BranchPoint, "vertical wavenumber vanishes");
  const cplx f(1.0, loss);
  const cplx rho = m.rho * f * f;
  const double tau_ = tau(d);
  ElasticFreeSpace out;
  out.Ds = -1.0 / (2.0 * omega * omega * rho * ksz * ksz);
  out.Dc = -1.0 / (2.0 * omega * omega * rho * kcz * kcz);
  // tau times the textbook listing; this is what reproduces the free-space dyadic for z < z'
  out.x[0] = tau_ * (*k.ks) * (*k.ks) * out.Ds;
  out.x[1] = -tau_ * kcz * kcz * out.Dc;
  out.x[2] = iu * ksz * out.Ds;
  out.x[3] = iu * kcz * out.Dc;
  out.x[4] = tau_ * out.Ds;
  return out;
}

TractionScalars evaluate_traction_scalars(const WaveAmplitudes& a, const ElasticLayer& layer, double k_rho, double z) {
  TractionScalars out;
  out.fluid = layer.phase == Phase::Fluid;
  if (layer.phase == Phase::Vacuum) return out;
  const cplx ksz = layer.phase == Phase::Solid ? vertical_wavenumber(layer.ks, k_rho) : cplx(0);
  const cplx kcz = vertical_wavenumber(layer.kc, k_rho);
  const double r = k_rho * k_rho;
  // the layer does not store omega; kc^2 gamma = omega^2 rho recovers it
  const double w = std::sqrt(layer.kc * layer.kc * layer.gamma() / layer.rho).real();
  std::array<double, 10> rowmax{};
  double amax = 0;
  for (int slot = 1; slot <= 5; ++slot)
    for (int d = 0; d < 2; ++d) {
      const cplx amp = a[slot - 1][d];
      if (amp == cplx(0)) continue;
      const double tau_ = d == 0 ? 1.0 : -1.0;
      const cplx e = std::exp(tau_ * iu * (is_p_slot(slot) ? kcz : ksz) * z);
      const auto row = traction_row(layer, w, ksz, kcz, r, slot, tau_, e);
      amax = std::max(amax, std::abs(amp));
      for (int i = 0; i < 10; ++i) {
        out.T[i] += row[i] * amp;
        rowmax[i] = std::max(rowmax[i], std::abs(row[i]));
      }
    }
  for (int i = 0; i < 10; ++i) out.scale[i] = rowmax[i] * amax;
  return out;
}

ElasticSpectralSolution::ElasticSpectralSolution(const LayerStack& stack, double omega, double k_rho, double z_src,
                                                 SourceKind kind)
    : stack_(stack), omega_(omega), k_rho_(k_rho), z_src_(z_src), kind_(kind) {
  if (stack.kind() != ProblemKind::Elastic) throw Error(ErrorKind::InvalidStack, "elastic solve needs an elastic stack");
  if (!(omega > 0)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
  if (!(k_rho >= 0) || !std::isfinite(k_rho)) throw Error(ErrorKind::InvalidArgument, "k_rho must be >= 0");
  src_ = stack.locate(z_src);
  const Phase sp = stack.phase(src_);
  if (kind == SourceKind::Tensor && sp != Phase::Solid)
    throw Error(ErrorKind::PhaseMismatch, "tensor sources must sit in a solid layer");
  if (kind == SourceKind::Vector && sp != Phase::Fluid)
    throw Error(ErrorKind::PhaseMismatch, "vector sources must sit in a fluid layer");
  const int n = stack.num_layers();
  for (int t = 0; t < n; ++t) {
    layers_.push_back(elastic_layer(stack, t, omega));
    const ElasticLayer& L = layers_.back();
    ksz_.push_back(L.phase == Phase::Solid ? vertical_wavenumber(L.ks, k_rho) : cplx(0));
    kcz_.push_back(L.phase != Phase::Vacuum ? vertical_wavenumber(L.kc, k_rho) : cplx(0));
  }
  amp_.assign(n, Eigen::Matrix<cplx, 5, 2>::Zero());

  const ElasticLayer& S = layers_[src_];
  if (kind == SourceKind::Tensor) {
    const auto& m = std::get<ElasticMaterial>(stack.material(src_));
    free_[0] = elastic_free_space_coeffs(omega, m, k_rho, Direction::Up, stack.loss());
    free_[1] = elastic_free_space_coeffs(omega, m, k_rho, Direction::Down, stack.loss());
  } else {
    if (std::abs(kcz_[src_]) < branch_tol(S.kc)) throw Error(ErrorKind::BranchPoint, "kcz vanishes in the source layer");
    const cplx g = iu / (2.0 * omega * omega * S.rho * kcz_[src_]);
    free_[0].x[1] = g;
    free_[1].x[1] = g;
  }
}

std::vector<ElasticSpectralSolution::Term> ElasticSpectralSolution::terms(double z, int t) const {
  std::vector<Term> out;
  for (int slot = 1; slot <= 5; ++slot) {
    out.push_back({slot, Direction::Up, amplitude(t, slot, Direction::Up), stack_.up_reference(t)});
    out.push_back({slot, Direction::Down, amplitude(t, slot, Direction::Down), stack_.down_reference(t)});
  }
  if (t == src_) {
    if (std::abs(z - z_src_) <= stack_.eps_iface())
      throw Error(ErrorKind::CoincidentDepths, "target depth coincides with the source");
    const Direction d = z > z_src_ ? Direction::Up : Direction::Down;
    for (int slot = 1; slot <= 5; ++slot)
      out.push_back({slot, d, free_[static_cast<int>(d)].x[slot - 1], z_src_});
  }
  return out;
}

ElasticLayerCoefficients ElasticSpectralSolution::coefficients(int t) const {
  const ElasticLayer& L = layers_.at(t);
  if (L.phase == Phase::Vacuum) return VacuumCoefficients{};
  WaveAmplitudes x{};
  for (int slot = 1; slot <= 5; ++slot) {
    const cplx k = wave_number(t, slot);
    x[slot - 1][0] = amplitude(t, slot, Direction::Up) * std::exp(-iu * k * stack_.up_reference(t));
    x[slot - 1][1] = amplitude(t, slot, Direction::Down) * std::exp(iu * k * stack_.down_reference(t));
  }
  if (L.phase == Phase::Fluid) return FluidCoefficients{{x[1][0], x[1][1]}, {x[3][0], x[3][1]}};
  return SolidCoefficients{x};
}

BasisCoefficients<double> ElasticSpectralSolution::g_coefficients(double z, int t) const {
  BasisCoefficients<double> c;
  c.restricted = true;
  if (layers_.at(t).phase == Phase::Vacuum) return c;
  const double r = k_rho_ * k_rho_;
  for (const Term& term : terms(z, t)) {
    if (term.amp == cplx(0)) continue;
    const double tau_ = tau(term.dir);
    const cplx k = wave_number(t, term.slot);
    const cplx ae = term.amp * std::exp(tau_ * iu * k * (z - term.ref));
    const cplx tk = tau_ * iu * k;
    switch (term.slot) {
      case 1: c(1) += -tk * ae; c(4) += ae; break;
      case 3: c(2) += -r * ae; c(3) += -tk * ae; break;
      case 5: c(4) += -r * ae; c(5) += -tk * ae; break;
      case 2: c(2) += tk * ae; c(3) += ae; break;
      case 4: c(4) += tk * ae; c(5) += ae; break;
    }
  }
  return c;
}

TractionScalars ElasticSpectralSolution::traction(double z, int t) const {
  TractionScalars out;
  const ElasticLayer& L = layers_.at(t);
  out.fluid = L.phase == Phase::Fluid;
  if (L.phase == Phase::Vacuum) return out;
  const double r = k_rho_ * k_rho_;
  std::array<double, 10> rowmax{};
  double amax = 0;
  for (const Term& term : terms(z, t)) {
    if (term.amp == cplx(0)) continue;
    const double tau_ = tau(term.dir);
    const cplx e = std::exp(tau_ * iu * wave_number(t, term.slot) * (z - term.ref));
    const auto row = traction_row(L, omega_, ksz_[t], kcz_[t], r, term.slot, tau_, e);
    amax = std::max(amax, std::abs(term.amp));
    for (int i = 0; i < 10; ++i) {
      out.T[i] += row[i] * term.amp;
      rowmax[i] = std::max(rowmax[i], std::abs(row[i]));
    }
  }
  for (int i = 0; i < 10; ++i) out.scale[i] = rowmax[i] * amax;
  return out;
}

void ElasticSpectralSolution::perturb(double relative, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& m : amp_)
    for (int i = 0; i < 5; ++i)
      for (int d = 0; d < 2; ++d)
        if (m(i, d) != cplx(0)) m(i, d) += relative * std::abs(m(i, d)) * cplx(u(rng), u(rng));
}

ElasticSpectralSolution solve_elastic_spectral(const LayerStack& stack, double omega, double k_rho, double z_src,
                                               SourceKind kind) {
  ElasticSpectralSolution sol(stack, omega, k_rho, z_src, kind);
  const int nl = stack.num_layers();
  const int j = sol.source_layer();
  const double r = k_rho * k_rho;
  using Dense = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

  for (int group = 0; group < 2; ++group) {
    const bool group_a = group == 0;
    if (kind == SourceKind::Vector && group_a) continue;

    // unknowns: layer-major, then direction, then slot; radiation removes the incoming direction outright
    std::vector<std::array<std::array<int, 2>, 5>> index(nl);
    int n = 0;
    for (int t = 0; t < nl; ++t)
      for (int d = 0; d < 2; ++d)
        for (int slot = 1; slot <= 5; ++slot) {
          index[t][slot - 1][d] = -1;
          const Phase ph = stack.phase(t);
          const bool incoming = (t == 0 && d == 1) || (t == nl - 1 && d == 0);
          if (incoming || !in_group(slot, ph, group_a)) continue;
          index[t][slot - 1][d] = n++;
        }

    std::vector<Condition> ca, cb;
    int neq = 0;
    for (int l = 0; l + 1 < nl; ++l) {
      interface_conditions(stack.phase(l), stack.phase(l + 1), ca, cb);
      neq += static_cast<int>((group_a ? ca : cb).size());
    }
    if (neq != n)
      throw Error(ErrorKind::InvalidStack, "interface system is not square (" + std::to_string(neq) + " equations, " +
                                               std::to_string(n) + " unknowns)");
    if (n == 0) continue;

    Dense m = Dense::Zero(n, n);
    Vector rhs = Vector::Zero(n);
    int row = 0;
    for (int l = 0; l + 1 < nl; ++l) {
      const double d = stack.interface(l);
      interface_conditions(stack.phase(l), stack.phase(l + 1), ca, cb);
      for (const Condition& c : group_a ? ca : cb) {
        for (int s = 0; s < 2; ++s) {
          if ((c.side == Side::Upper && s == 1) || (c.side == Side::Lower && s == 0)) continue;
          const int t = l + s;
          const double sign = (c.side == Side::Both && s == 1) ? -1.0 : 1.0;
          const ElasticLayer& L = sol.layer(t);
          for (int dir = 0; dir < 2; ++dir) {
            const double tau_ = dir == 0 ? 1.0 : -1.0;
            const double ref = dir == 0 ? stack.up_reference(t) : stack.down_reference(t);
            for (int slot = 1; slot <= 5; ++slot) {
              const int col = index[t][slot - 1][dir];
              if (col < 0) continue;
              const cplx k = is_p_slot(slot) ? sol.kcz(t) : sol.ksz(t);
              const cplx e = std::exp(tau_ * iu * k * (d - ref));
              m(row, col) += sign * traction_row(L, omega, sol.ksz(t), sol.kcz(t), r, slot, tau_, e)[c.T - 1];
            }
          }
          if (t == j) {
            // the upper layer meets its lower boundary (z < z'), the lower layer its upper one
            const int dir = s == 0 ? 1 : 0;
            const double tau_ = dir == 0 ? 1.0 : -1.0;
            for (int slot = 1; slot <= 5; ++slot) {
              if (!in_group(slot, L.phase, group_a)) continue;
              const cplx a = sol.free_[dir].x[slot - 1];
              if (a == cplx(0)) continue;
              const cplx k = is_p_slot(slot) ? sol.kcz(t) : sol.ksz(t);
              const cplx e = std::exp(tau_ * iu * k * (d - z_src));
              rhs(row) -= sign * a * traction_row(L, omega, sol.ksz(t), sol.kcz(t), r, slot, tau_, e)[c.T - 1];
            }
          }
        }
        ++row;
      }
    }
    for (int i = 0; i < n; ++i) {
      const double s = m.row(i).cwiseAbs().maxCoeff();
      if (s == 0) throw Error(ErrorKind::SingularSystem, "empty interface equation");
      m.row(i) /= s;
      rhs(i) /= s;
    }
    const Vector x = BandedLU<cplx>(m).solve(rhs);
    for (int t = 0; t < nl; ++t)
      for (int slot = 1; slot <= 5; ++slot)
        for (int d = 0; d < 2; ++d)
          if (index[t][slot - 1][d] >= 0) sol.amp_[t](slot - 1, d) = x(index[t][slot - 1][d]);
  }
  return sol;
}

AssembledTensor assemble_g_elastic(const ElasticSpectralSolution& sol, const SpectralPoint<double>& p, double z, int t) {
  if (std::abs(p.k_rho - sol.k_rho()) > 1e-12 * std::max(1.0, sol.k_rho()))
    throw Error(ErrorKind::InvalidArgument, "spectral point does not match the solved k_rho");
  AssembledTensor out;
  out.coeffs = sol.g_coefficients(z, t);
  out.n5 = sol.k_rho() * sol.k_rho() * out.coeffs(5);
  out.matrix = realize(out.coeffs, p);
  return out;
}

AssembledTensor assemble_g_elastic(const ElasticSpectralSolution& sol, const SpectralPoint<double>& p, double z) {
  return assemble_g_elastic(sol, p, z, sol.layer_of(z));
}

std::vector<ElasticInterfaceReport> elastic_interface_residuals(const ElasticSpectralSolution& sol) {
  const LayerStack& stack = sol.stack();
  std::vector<ElasticInterfaceReport> out;
  std::vector<Condition> ca, cb;
  for (int l = 0; l < stack.num_interfaces(); ++l) {
    const double d = stack.interface(l);
    interface_conditions(stack.phase(l), stack.phase(l + 1), ca, cb);
    std::vector<Condition> all;
    if (sol.source_kind() == SourceKind::Tensor) all = ca;
    all.insert(all.end(), cb.begin(), cb.end());
    const TractionScalars up = sol.traction(d, l), lo = sol.traction(d, l + 1);
    ElasticInterfaceReport rep;
    rep.interface = l;
    for (const Condition& c : all) {
      rep.checked.push_back(c.T);
      const int i = c.T - 1;
      cplx diff = 0;
      double scale = 0;
      if (c.side != Side::Lower) { diff += up.T[i]; scale = std::max(scale, up.scale[i]); }
      if (c.side != Side::Upper) { diff -= lo.T[i]; scale = std::max(scale, lo.scale[i]); }
      const double rel = scale > 0 ? std::abs(diff) / scale : std::abs(diff);
      rep.max_relative = std::max(rep.max_relative, rel);
    }
    std::sort(rep.checked.begin(), rep.checked.end());
    out.push_back(rep);
  }
  return out;
}

}  // namespace lmgf
