#pragma once

// Spectral-to-spatial transforms. Basis coefficients do not depend on the azimuth
// of (kx, ky), so every entry of the spatial tensor reduces to radial integrals
// against J0, J1 and J2 with trigonometric factors of the target azimuth.

#include <functional>
#include <vector>

#include "lmgf/basis.hpp"
#include "lmgf/stack.hpp"

namespace lmgf {

struct QuadratureSpec {
  double k_max = 0;        // truncation of the adaptive part; 0 picks truncation_factor * max|k|
  double truncation_factor = 12;
  int panels = 4;          // initial panels between consecutive breakpoints
  double rel_tol = 1e-9;
  double loss = 1e-5;      // minimum loss applied to the stack before integrating
  long max_evaluations = 400000;
};

struct RadialIntegrand {
  std::function<cplx(double)> f;
  int order = 0;  // Bessel order 0, 1 or 2
  double rho = 0;
  std::vector<double> breakpoints;  // interior points where f is nearly singular
};

// (1 / 2 pi) int_0^inf f(k) J_n(k rho) k dk; spec.k_max must be positive here
cplx inverse_radial_transform(const RadialIntegrand& integrand, const QuadratureSpec& spec);

enum class Field { GE, GH, Elastic };

// spatial Green's tensor at target for a point source; elastic uses the tensor source
// in solids and the vector source ([0 0 g]) in fluids
Mat3 spatial_green(const LayerStack& stack, double omega, const Eigen::Vector3d& source,
                   const Eigen::Vector3d& target, Field which, const QuadratureSpec& spec = {});

namespace detail {

using Channels = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

struct QuadratureResult {
  Channels value;
  long evaluations = 0;
};

// vector adaptive Gauss-Kronrod (7/15) on [0, k_max] split at the breakpoints, then
// unit panels of the given width until the tail is negligible
QuadratureResult integrate_radial(const std::function<Channels(double)>& f, int channels,
                                  std::vector<double> breakpoints, double k_max, double tail_width,
                                  const QuadratureSpec& spec);

// spatial tensor from the radial channels at target azimuth phi. Channel order:
// I0 c1, I0 c2, I0 c9, I1 k c3, I1 k c4, I1 k c6, I1 k c7, I0 n5, I2 n5, I0 n8, I2 n8
// with In[f] = (1 / 2 pi) int f Jn(k rho) k dk and n5, n8 = k^2 c5, k^2 c8
Mat3 assemble_spatial(const Channels& I, double phi);

}  // namespace detail

}  // namespace lmgf
