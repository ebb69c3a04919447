#include "doctest.h"

#include <chrono>
#include <random>

#include "lmgf/closed_form.hpp"
#include "lmgf/hankel.hpp"

using namespace lmgf;

namespace {

Eigen::Matrix3d rotation_z(double phi) {
  return Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

// targets at distance r from the origin, kept off the source plane
std::vector<Eigen::Vector3d> shell_targets(int n, double r_min, double r_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Eigen::Vector3d> out;
  for (int i = 0; i < n; ++i) {
    const double r = r_min + (r_max - r_min) * i / std::max(n - 1, 1);
    const double el = (0.2 + 1.2 * u(rng)) * (i % 2 ? 1 : -1);
    const double az = 2 * M_PI * u(rng);
    out.emplace_back(r * std::cos(el) * std::cos(az), r * std::cos(el) * std::sin(az), r * std::sin(el));
  }
  return out;
}

}  // namespace

TEST_CASE("Sommerfeld identity") {
  const cplx k = cplx(1.0, 1e-4);
  RadialIntegrand in;
  in.f = [&](double kr) {
    const cplx kz = vertical_wavenumber(k, kr);
    return iu * std::exp(iu * kz * 1.0) / (2.0 * kz);
  };
  in.order = 0;
  in.rho = 1.0;
  in.breakpoints = {1.0};
  QuadratureSpec spec;
  spec.k_max = 12;
  const cplx got = inverse_radial_transform(in, spec);
  const cplx ref = helmholtz_green(k, std::sqrt(2.0));
  CHECK(std::abs(got - ref) <= 1e-5 * std::abs(ref));
}

TEST_CASE("trivial transforms") {
  QuadratureSpec spec;
  spec.k_max = 5;
  RadialIntegrand zero{[](double) { return cplx(0); }, 0, 1.0, {}};
  CHECK(inverse_radial_transform(zero, spec) == cplx(0));
  RadialIntegrand axis{[](double k) { return cplx(std::exp(-k * k)); }, 1, 0.0, {}};
  CHECK(inverse_radial_transform(axis, spec) == cplx(0));
  // (1 / 2 pi) int exp(-k^2) J0(k rho) k dk = exp(-rho^2 / 4) / (4 pi)
  RadialIntegrand gauss{[](double k) { return cplx(std::exp(-k * k)); }, 0, 1.3, {}};
  CHECK(std::abs(inverse_radial_transform(gauss, spec) - std::exp(-1.3 * 1.3 / 4) / (4 * M_PI)) <= 1e-12);
}

TEST_CASE("channel mapping against a two-dimensional quadrature") {
  // smooth radial coefficients; every basis matrix gets its own profile
  const auto profile = [](int i, double k) { return cplx(std::cos(0.3 * i), std::sin(0.2 * i)) * std::exp(-k * k * (0.5 + 0.1 * i)); };
  const double x = 0.7, y = -0.4, rho = std::hypot(x, y), phi = std::atan2(y, x);
  QuadratureSpec spec;
  spec.k_max = 12;
  spec.rel_tol = 1e-12;

  detail::Channels I(11);
  const auto transform = [&](int order, std::function<cplx(double)> f) {
    return inverse_radial_transform(RadialIntegrand{std::move(f), order, rho, {}}, spec);
  };
  I << transform(0, [&](double k) { return profile(1, k); }), transform(0, [&](double k) { return profile(2, k); }),
      transform(0, [&](double k) { return profile(9, k); }), transform(1, [&](double k) { return k * profile(3, k); }),
      transform(1, [&](double k) { return k * profile(4, k); }), transform(1, [&](double k) { return k * profile(6, k); }),
      transform(1, [&](double k) { return k * profile(7, k); }),
      transform(0, [&](double k) { return k * k * profile(5, k); }),
      transform(2, [&](double k) { return k * k * profile(5, k); }),
      transform(0, [&](double k) { return k * k * profile(8, k); }),
      transform(2, [&](double k) { return k * k * profile(8, k); });
  const Mat3 mapped = detail::assemble_spatial(I, phi);

  // (1 / 4 pi^2) sum over a square grid; the integrand is Gaussian so the trapezoid rule is spectral
  const int n = 241;
  const double L = 9.0, h = 2 * L / (n - 1);
  Mat3 brute = Mat3::Zero();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const SpectralPoint<double> p(-L + a * h, -L + b * h);
      Mat3 m = Mat3::Zero();
      for (int i = 1; i <= 9; ++i) m += profile(i, p.k_rho) * basis_matrix(i, p);
      brute += m * std::exp(iu * (p.kx * x + p.ky * y));
    }
  brute *= h * h / (4 * M_PI * M_PI);
  CHECK(rel_error(mapped, brute) <= 1e-10);
}

TEST_CASE("free-space EM dyadics from the spatial transform") {
  const EmMaterial m{1, 1};
  const LayerStack s({}, {m});
  const double w = 1.0;
  QuadratureSpec spec;
  spec.loss = 1e-5;
  const cplx k = em_wavenumber(m, w, spec.loss);
  const double lambda = 2 * M_PI / w;
  const Eigen::Vector3d src(0, 0, 0);
  const auto start = std::chrono::steady_clock::now();
  for (const auto& t : shell_targets(10, 0.5 * lambda, 5 * lambda, 3)) {
    CHECK(rel_error(spatial_green(s, w, src, t, Field::GE, spec), em_electric_dyadic(k, t)) <= 1e-5);
    CHECK(rel_error(spatial_green(s, w, src, t, Field::GH, spec), em_magnetic_dyadic(k, w, m.mu, t)) <= 1e-5);
  }
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 30.0);
}

TEST_CASE("free-space elastic dyadic from the spatial transform") {
  const ElasticMaterial m{2, 3, 1};
  const LayerStack s({}, {m});
  const double w = 1.0;
  QuadratureSpec spec;
  spec.loss = 1e-5;
  const double lambda = 2 * M_PI / elastic_wavenumbers(m, w).ks->real();
  const Eigen::Vector3d src(0.2, -0.1, 0.3);
  for (const auto& t : shell_targets(10, 0.5 * lambda, 5 * lambda, 5))
    CHECK(rel_error(spatial_green(s, w, src, src + t, Field::Elastic, spec), elastic_dyadic(m, w, t, spec.loss)) <= 1e-5);
}

TEST_CASE("rotating the target conjugates the tensor") {
  const LayerStack s({0.0, -1.0}, {EmMaterial{1, 1}, EmMaterial{3, 1}, EmMaterial{2, 1.5}}, 1e-2);
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  const Eigen::Vector3d src(0, 0, 0.4), base(1.7, 0, -0.5);
  const Mat3 g0 = spatial_green(s, 1.0, src, base, Field::GE, spec);
  for (int i = 1; i < 8; ++i) {
    const double phi = i * M_PI / 4 + 0.1;
    const Eigen::Matrix3cd R = rotation_z(phi).cast<cplx>();
    const Eigen::Vector3d t = rotation_z(phi) * base;
    CHECK(rel_error(spatial_green(s, 1.0, src, Eigen::Vector3d(t(0), t(1), base(2)), Field::GE, spec),
                    Mat3(R * g0 * R.transpose())) <= 1e-8);
  }
}

TEST_CASE("tightening the tolerance moves the result less than the coarse tolerance") {
  const LayerStack s({0.0}, {ElasticMaterial{2, 3, 1}, ElasticMaterial{1, 2, 0}}, 1e-2);
  QuadratureSpec coarse, fine;
  coarse.rel_tol = 1e-6;
  fine.rel_tol = 0.5e-6;
  const Eigen::Vector3d src(0, 0, 0.6), t(2.0, 1.0, -0.8);
  const Mat3 a = spatial_green(s, 1.0, src, t, Field::Elastic, coarse);
  const Mat3 b = spatial_green(s, 1.0, src, t, Field::Elastic, fine);
  CHECK(rel_error(a, b) <= coarse.rel_tol);
}

TEST_CASE("same-depth targets are refused") {
  const LayerStack s({}, {EmMaterial{1, 1}});
  try {
    spatial_green(s, 1.0, Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Field::GE);
    FAIL("coincident depths accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoincidentDepths);
  }
}
