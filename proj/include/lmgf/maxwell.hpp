#pragma once

// Layered-medium Maxwell Green's functions through the two scalar systems
// b1 (TE) and b2 (TM), with b3 = -d/dz' b2 sharing the b2 matrix.

#include <vector>

#include "lmgf/basis.hpp"
#include "lmgf/stack.hpp"

namespace lmgf {

enum class EmChannel { B1 = 0, B2 = 1, B3 = 2 };
enum class Direction { Up = 0, Down = 1 };

inline double tau(Direction d) { return d == Direction::Up ? 1.0 : -1.0; }

// value and first two z-derivatives
struct Jet {
  cplx v{0}, dz{0}, dzz{0};
  Jet& operator+=(const Jet& o) { v += o.v; dz += o.dz; dzz += o.dzz; return *this; }
};

struct EmFreeSpaceB {
  cplx b1, b2, b3;
};

// free-space scalars in a homogeneous medium; z != z'
EmFreeSpaceB em_free_space_b(double omega, const EmMaterial& m, double k_rho, double z, double z_src,
                             double loss = 0);

class EmSpectralSolution {
public:
  EmSpectralSolution(const LayerStack& stack, double omega, double k_rho, double z_src);

  const LayerStack& stack() const { return stack_; }
  double omega() const { return omega_; }
  double k_rho() const { return k_rho_; }
  double z_src() const { return z_src_; }
  int source_layer() const { return src_; }
  const EmLayer& layer(int t) const { return layers_.at(t); }
  cplx kz(int t) const { return kz_.at(t); }
  double eps_degenerate() const { return eps_degenerate_; }

  // amplitude of exp(+-i kz (z - ref)) with the layer-local reference depth
  cplx amplitude(EmChannel c, int t, Direction d) const;
  // the same term written as b^{r*} exp(+-i kz z)
  cplx reaction_coefficient(EmChannel c, int t, Direction d) const;

  Jet reaction(EmChannel c, double z, int t) const;
  Jet free_part(EmChannel c, double z) const;
  // full b = free (source layer only) + reaction; layer chosen explicitly for one-sided limits
  Jet total(EmChannel c, double z, int t) const;
  Jet total(EmChannel c, double z) const;

  int layer_of(double z) const;

  // used only by fault injection in validation runs
  void perturb(double relative, unsigned long long seed);

private:
  friend EmSpectralSolution solve_em_spectral(const LayerStack&, double, double, double);

  LayerStack stack_;
  double omega_, k_rho_, z_src_;
  int src_ = 0;
  double eps_degenerate_ = 1e-8;
  std::vector<EmLayer> layers_;
  std::vector<cplx> kz_;
  // rows 2t (up), 2t + 1 (down); columns B1, B2, B3
  Eigen::Matrix<cplx, Eigen::Dynamic, 3> amp_;
};

EmSpectralSolution solve_em_spectral(const LayerStack& stack, double omega, double k_rho, double z_src);

// a tensor in basis form; n5, n8 are k_rho^2 c5 and k_rho^2 c8 which stay finite as k_rho -> 0
struct AssembledTensor {
  BasisCoefficients<double> coeffs;
  cplx n5{0}, n8{0};
  Mat3 matrix = Mat3::Zero();
};

// realize c1..c9 using n5 and n8 with the unit-direction J5, J8
Mat3 realize_stable(const BasisCoefficients<double>& c, cplx n5, cplx n8, const SpectralPoint<double>& p);

AssembledTensor assemble_ge(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z);
AssembledTensor assemble_ge(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z, int t);
AssembledTensor assemble_gh(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z);
AssembledTensor assemble_gh(const EmSpectralSolution& sol, const SpectralPoint<double>& p, double z, int t);

struct PotentialJet {
  BasisCoefficients<double> v, dz, dzz;
};

// a1 J1 + a2 J2 + a5 J5
PotentialJet transverse_potential(const EmSpectralSolution& sol, double z);
// a1 J1 + a2 J2 + a4 J4
PotentialJet sommerfeld_potential(const EmSpectralSolution& sol, double z);

inline BasisCoefficients<double> recover_transverse_potential(const EmSpectralSolution& sol, double z) {
  return transverse_potential(sol, z).v;
}
inline BasisCoefficients<double> recover_sommerfeld_potential(const EmSpectralSolution& sol, double z) {
  return sommerfeld_potential(sol, z).v;
}

// -i omega [A + (J5 A + (J3 + J4) dA/dz + J2 d2A/dz2) / k^2]
BasisCoefficients<double> apply_electric_operator(const PotentialJet& a, cplx k, double omega, double k_rho);

struct InterfaceResidual {
  int interface = 0;
  double max_relative = 0;
};

// jumps of J1 GE, eps J2 GE, J9 GH, mu J7 GH at every interface
std::vector<InterfaceResidual> em_interface_residuals(const EmSpectralSolution& sol, const SpectralPoint<double>& p);

}  // namespace lmgf
