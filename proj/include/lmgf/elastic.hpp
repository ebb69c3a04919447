#pragma once

// Layered elastic Green's functions in the restricted basis. A solid layer carries
// five coefficients per direction: x1, x3, x5 ride on S waves and x2, x4 on P waves.
// A fluid layer carries (u, v), which occupy the P slots 2 and 4.

#include <array>
#include <variant>
#include <vector>

#include "lmgf/basis.hpp"
#include "lmgf/maxwell.hpp"
#include "lmgf/stack.hpp"

namespace lmgf {

enum class SourceKind { Tensor, Vector };

struct ElasticFreeSpace {
  cplx Ds{0}, Dc{0};
  // x1..x5 multiplying exp(tau i kw (z - z')), valid on the gated side of the source
  std::array<cplx, 5> x{};
};

ElasticFreeSpace elastic_free_space_coeffs(double omega, const ElasticMaterial& m, double k_rho, Direction d,
                                           double loss = 0);

// 1-based T1..T10; a fluid side only defines T1..T4
struct TractionScalars {
  std::array<cplx, 10> T{};
  std::array<double, 10> scale{};  // size of each T if every amplitude took its largest magnitude
  bool fluid = false;
  cplx operator()(int i) const { return T[i - 1]; }
};

// amplitudes multiplying exp(tau i kw z); a[k-1][dir] for slot k, dir 0 = up, 1 = down
using WaveAmplitudes = std::array<std::array<cplx, 2>, 5>;

TractionScalars evaluate_traction_scalars(const WaveAmplitudes& a, const ElasticLayer& layer, double k_rho, double z);

struct SolidCoefficients {
  WaveAmplitudes x{};
};
struct FluidCoefficients {
  std::array<cplx, 2> u{}, v{};
};
struct VacuumCoefficients {};
using ElasticLayerCoefficients = std::variant<SolidCoefficients, FluidCoefficients, VacuumCoefficients>;

class ElasticSpectralSolution {
public:
  ElasticSpectralSolution(const LayerStack& stack, double omega, double k_rho, double z_src, SourceKind kind);

  const LayerStack& stack() const { return stack_; }
  double omega() const { return omega_; }
  double k_rho() const { return k_rho_; }
  double z_src() const { return z_src_; }
  int source_layer() const { return src_; }
  SourceKind source_kind() const { return kind_; }
  const ElasticLayer& layer(int t) const { return layers_.at(t); }
  cplx ksz(int t) const { return ksz_.at(t); }
  cplx kcz(int t) const { return kcz_.at(t); }
  int layer_of(double z) const { return stack_.locate(z); }

  // layer-local amplitude of slot k (1..5) in direction d
  cplx amplitude(int t, int slot, Direction d) const { return amp_.at(t)(slot - 1, static_cast<int>(d)); }
  // reaction coefficients written against exp(tau i kw z)
  ElasticLayerCoefficients coefficients(int t) const;

  // c1..c5 of G at depth z in layer t, free part included
  BasisCoefficients<double> g_coefficients(double z, int t) const;
  TractionScalars traction(double z, int t) const;

  void perturb(double relative, unsigned long long seed);

private:
  friend ElasticSpectralSolution solve_elastic_spectral(const LayerStack&, double, double, double, SourceKind);

  struct Term {
    int slot;
    Direction dir;
    cplx amp;
    double ref;
  };
  std::vector<Term> terms(double z, int t) const;
  cplx wave_number(int t, int slot) const { return (slot == 2 || slot == 4) ? kcz_[t] : ksz_[t]; }

  LayerStack stack_;
  double omega_, k_rho_, z_src_;
  int src_ = 0;
  SourceKind kind_;
  std::vector<ElasticLayer> layers_;
  std::vector<cplx> ksz_, kcz_;
  std::vector<Eigen::Matrix<cplx, 5, 2>> amp_;
  std::array<ElasticFreeSpace, 2> free_{};
};

ElasticSpectralSolution solve_elastic_spectral(const LayerStack& stack, double omega, double k_rho, double z_src,
                                               SourceKind kind);

// tensor source: the 3x3 G; vector source: [0 0 g] with g the displacement vector
AssembledTensor assemble_g_elastic(const ElasticSpectralSolution& sol, const SpectralPoint<double>& p, double z);
AssembledTensor assemble_g_elastic(const ElasticSpectralSolution& sol, const SpectralPoint<double>& p, double z, int t);

struct ElasticInterfaceReport {
  int interface = 0;
  std::vector<int> checked;  // T indices compared at this interface
  double max_relative = 0;
};

std::vector<ElasticInterfaceReport> elastic_interface_residuals(const ElasticSpectralSolution& sol);

}  // namespace lmgf
