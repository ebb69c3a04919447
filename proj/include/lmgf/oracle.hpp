#pragma once

// Brute-force reference solvers. They work on full 3x3 unknowns per layer and
// direction, with interface rows written entrywise from the physical continuity
// conditions, and share nothing with the basis assembly.

#include <array>
#include <vector>

#include "lmgf/basis.hpp"
#include "lmgf/elastic.hpp"
#include "lmgf/stack.hpp"

namespace lmgf {

struct FullTensorSolution {
  LayerStack stack;
  double omega = 0;
  SpectralPoint<double> point;
  double z_src = 0;
  int source_layer = 0;
  ProblemKind kind = ProblemKind::Maxwell;
  SourceKind source = SourceKind::Tensor;

  // per layer: {up, down} unknowns against layer-local reference depths.
  // EM: columns of G_A; elastic solid: X; elastic fluid: G itself.
  std::vector<std::array<Mat3, 2>> local;
  double condition = 0;  // 2-norm condition of the equilibrated system
  double residual = 0;   // relative least-squares residual
};

// unknown of layer t, direction d, rewritten against exp(+-i kz z) (the form whose class is tested)
Mat3 oracle_layer_tensor(const FullTensorSolution& s, int t, Direction d);

FullTensorSolution oracle_em_full(const LayerStack& stack, double omega, const SpectralPoint<double>& p, double z_src);
FullTensorSolution oracle_elastic_full(const LayerStack& stack, double omega, const SpectralPoint<double>& p,
                                       double z_src, SourceKind kind);

// total fields at depth z in layer t (free part included in the source layer)
Mat3 oracle_em_ge(const FullTensorSolution& s, double z, int t);
Mat3 oracle_em_gh(const FullTensorSolution& s, double z, int t);
Mat3 oracle_elastic_g(const FullTensorSolution& s, double z, int t);

enum class HalfspaceMode { TE, TM, Acoustic };

// reflection of a downgoing unit wave at an interface between two half spaces,
// referenced at the interface
cplx oracle_halfspace_reflection(HalfspaceMode mode, const Material& upper, const Material& lower, double omega,
                                 double k_rho, double loss = 0);

namespace detail {

// Eigen's cross() conjugates complex results; the symbol calculus needs the plain product
inline Eigen::Vector3cd cross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

struct LeastSquares {
  Eigen::MatrixXcd x;
  double condition = 0;
  double residual = 0;
};

// row- and column-equilibrated least squares for a full-column-rank, possibly tall system
LeastSquares solve_dense(Eigen::MatrixXcd m, Eigen::MatrixXcd rhs);

}  // namespace detail

}  // namespace lmgf
