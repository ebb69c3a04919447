#include "lmgf/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "lmgf/basis.hpp"

namespace lmgf {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

BasisCoefficients<double> random_coefficients(std::mt19937_64& rng, bool restricted) {
  std::normal_distribution<double> n(0.0, 1.0);
  BasisCoefficients<double> c;
  for (int i = 1; i <= (restricted ? 5 : 9); ++i) c(i) = cplx(n(rng), n(rng));
  c.restricted = restricted;
  return c;
}

}  // namespace

SelfcheckReport run_selfcheck(unsigned long long seed, int points) {
  SelfcheckReport rep;
  rep.points = points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI), logk(-2.0, 1.0);
  for (int s = 0; s < points; ++s) {
    const double kr = std::pow(10.0, logk(rng)), a = angle(rng);
    const SpectralPoint<double> p(kr * std::cos(a), kr * std::sin(a));
    const double r = p.k_rho_sq();
    const double weight = 1.0 + r * r;
    for (int u = 1; u <= 9; ++u)
      for (int v = 1; v <= 9; ++v) {
        const double e = detail::product_table_residual(p.kx, p.ky, u, v) / weight;
        rep.pair_residual[u - 1][v - 1] = std::max(rep.pair_residual[u - 1][v - 1], e);
        rep.product_residual = std::max(rep.product_residual, e);
      }

    // products computed in coefficients agree with matrix products
    const BasisCoefficients<double> x = random_coefficients(rng, false), y = random_coefficients(rng, false);
    const Mat3 direct = realize(x, p) * realize(y, p);
    const Mat3 via_basis = realize(multiply_in_basis(x, y, cplx(r)), p);
    rep.multiply_residual = std::max(rep.multiply_residual, rel_error(via_basis, direct));

    // restricted times restricted stays restricted
    const BasisCoefficients<double> rx = random_coefficients(rng, true), ry = random_coefficients(rng, true);
    BasisCoefficients<double> prod = multiply_in_basis(rx, ry, cplx(r));
    prod.restricted = false;
    const BasisCoefficients<double> back = decompose(realize(prod, p), p);
    double mass_r = 0, mass_i = 0;
    for (int i = 1; i <= 9; ++i)
      (i <= 5 ? mass_r : mass_i) += std::norm(back(i)) * basis_matrix<double>(i, p).squaredNorm();
    rep.closure_residual = std::max(rep.closure_residual, std::sqrt(mass_i / mass_r));

    // round trip through the realized matrix
    const BasisCoefficients<double> rt = decompose(realize(x, p), p);
    rep.roundtrip_residual = std::max(rep.roundtrip_residual, weighted_distance(rt, x, p) / weighted_norm(x, p));
  }
  rep.passed = rep.product_residual <= kProductTolerance && rep.multiply_residual <= 1e-12 &&
               rep.closure_residual <= 1e-10 && rep.roundtrip_residual <= 1e-10;
  return rep;
}

void print_selfcheck(const SelfcheckReport& rep, std::ostream& out, bool verbose) {
  out << "points " << rep.points << "\n";
  out << "product table      " << sci(rep.product_residual) << (rep.product_residual <= kProductTolerance ? " ok" : " FAIL")
      << "\n";
  out << "basis multiply     " << sci(rep.multiply_residual) << (rep.multiply_residual <= 1e-12 ? " ok" : " FAIL") << "\n";
  out << "restricted closure " << sci(rep.closure_residual) << (rep.closure_residual <= 1e-10 ? " ok" : " FAIL") << "\n";
  out << "decompose roundtrip " << sci(rep.roundtrip_residual) << (rep.roundtrip_residual <= 1e-10 ? " ok" : " FAIL")
      << "\n";
  if (verbose) {
    out << "pair residuals (row u, column v)\n";
    for (int u = 0; u < 9; ++u) {
      out << "J" << u + 1;
      for (int v = 0; v < 9; ++v) out << " " << sci(rep.pair_residual[u][v]);
      out << "\n";
    }
  }
  out << (rep.passed ? "selfcheck passed" : "selfcheck FAILED") << "\n";
}

}  // namespace lmgf
