#pragma once

// Embedded algebra suite: every pairwise product against the table, closure of the
// restricted class, and decomposition round trips at random spectral points.

#include <array>
#include <iosfwd>

namespace lmgf {

struct SelfcheckReport {
  int points = 0;
  // max over points of |J_u J_v - table| / (1 + k_rho^4)
  std::array<std::array<double, 9>, 9> pair_residual{};
  double product_residual = 0;
  double multiply_residual = 0;   // multiply_in_basis vs realized matrix product, relative
  double closure_residual = 0;    // class-I mass of restricted products, relative
  double roundtrip_residual = 0;  // decompose(realize(c)) vs c, weighted relative
  bool passed = false;
};

inline constexpr double kProductTolerance = 1e-13;

SelfcheckReport run_selfcheck(unsigned long long seed, int points = 200);
void print_selfcheck(const SelfcheckReport& report, std::ostream& out, bool verbose);

}  // namespace lmgf
