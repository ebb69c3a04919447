#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lmgf/types.hpp"

namespace lmgf {

struct EmMaterial {
  double eps = 1;
  double mu = 1;
};

enum class Phase { Solid, Fluid, Vacuum };

struct ElasticMaterial {
  double rho = 1;
  double lambda = 1;
  double mu = 0;

  double gamma() const { return lambda + 2 * mu; }
  Phase phase() const { return mu > 0 ? Phase::Solid : Phase::Fluid; }
};

struct Vacuum {};

using Material = std::variant<EmMaterial, ElasticMaterial, Vacuum>;

enum class ProblemKind { Maxwell, Elastic };

Phase phase_of(const Material& m);

// k = sqrt(omega^2 eps mu)
cplx em_wavenumber(const EmMaterial& m, double omega, double loss = 0);

struct ElasticWavenumbers {
  std::optional<cplx> ks;  // absent in fluids
  cplx kc;
};

ElasticWavenumbers elastic_wavenumbers(const ElasticMaterial& m, double omega, double loss = 0);

// throws VacuumHasNoWavenumber for Vacuum
std::variant<cplx, ElasticWavenumbers> wavenumbers(const Material& m, double omega, double loss = 0);

// sqrt(k^2 - k_rho^2) with Re >= 0, and Im >= 0 when Re == 0
cplx vertical_wavenumber(cplx k, double k_rho);

class LayerStack {
public:
  // interfaces d_0 > d_1 > ... > d_{L-1}; materials top (0) to bottom (L)
  LayerStack(std::vector<double> interfaces, std::vector<Material> materials, double loss = 0);

  ProblemKind kind() const { return kind_; }
  int num_layers() const { return static_cast<int>(materials_.size()); }
  int num_interfaces() const { return static_cast<int>(interfaces_.size()); }
  double interface(int l) const { return interfaces_.at(l); }
  const std::vector<double>& interfaces() const { return interfaces_; }
  const Material& material(int t) const { return materials_.at(t); }
  Phase phase(int t) const { return phase_of(materials_.at(t)); }
  double loss() const { return loss_; }

  // lossy factor applied to every wavenumber
  cplx loss_factor() const { return {1.0, loss_}; }

  double geometry_scale() const;
  double eps_iface() const { return 1e-12 * geometry_scale(); }

  // layer t with d_{t-1} > z > d_t; throws OnInterface within eps_iface
  int locate(double z) const;

  // local reference depths keeping |exp(+-i kz (z - ref))| <= 1 inside layer t
  double up_reference(int t) const;
  double down_reference(int t) const;

  // largest |k| over non-vacuum layers (all of ks, kc for elastic)
  double max_wavenumber(double omega) const;

private:
  std::vector<double> interfaces_;
  std::vector<Material> materials_;
  ProblemKind kind_ = ProblemKind::Maxwell;
  double loss_ = 0;
};

// effective EM constants per layer including loss: eps carries (1 + i loss)^2
struct EmLayer {
  cplx eps, mu, k;
};
EmLayer em_layer(const LayerStack& stack, int t, double omega);

// effective elastic constants per layer; rho carries (1 + i loss)^2
struct ElasticLayer {
  Phase phase = Phase::Vacuum;
  cplx rho{0};
  double lambda = 0;
  double mu = 0;
  cplx ks{0};
  cplx kc{0};
  double gamma() const { return lambda + 2 * mu; }
};
ElasticLayer elastic_layer(const LayerStack& stack, int t, double omega);

}  // namespace lmgf
