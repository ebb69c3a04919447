#include "lmgf/closed_form.hpp"

#include <cmath>

#include "lmgf/errors.hpp"

namespace lmgf {

namespace {

using Vec = Eigen::Vector3cd;

Mat3 cross_matrix(const Vec& v) {
  Mat3 m;
  m << 0, -v(2), v(1), v(2), 0, -v(0), -v(1), v(0), 0;
  return m;
}

double distance(const Eigen::Vector3d& d) {
  const double r = d.norm();
  if (!(r > 0)) throw Error(ErrorKind::CoincidentDepths, "closed forms need r > 0");
  return r;
}

// grad grad g
Mat3 hessian(cplx k, const Eigen::Vector3d& d) {
  const double r = distance(d);
  const Eigen::Vector3cd u = (d / r).cast<cplx>();
  const cplx g = helmholtz_green(k, r);
  return g * ((-k * k - 3.0 * iu * k / r + 3.0 / (r * r)) * (u * u.transpose()) +
              (iu * k / r - 1.0 / (r * r)) * Mat3::Identity());
}

cplx spectral_kernel(cplx kz, double dz) { return iu * std::exp(iu * kz * std::abs(dz)) / (2.0 * kz); }

Vec symbol(const SpectralPoint<double>& p, cplx kz, double dz) {
  return Vec(iu * p.kx, iu * p.ky, (dz > 0 ? 1.0 : -1.0) * iu * kz);
}

}  // namespace

cplx helmholtz_green(cplx k, double r) { return std::exp(iu * k * r) / (4.0 * M_PI * r); }

Mat3 em_electric_dyadic(cplx k, const Eigen::Vector3d& d) {
  return helmholtz_green(k, distance(d)) * Mat3::Identity() + hessian(k, d) / (k * k);
}

Mat3 em_magnetic_dyadic(cplx k, double omega, cplx mu, const Eigen::Vector3d& d) {
  const double r = distance(d);
  const Vec grad = (helmholtz_green(k, r) * (iu * k - 1.0 / r)) * (d / r).cast<cplx>();
  return -cross_matrix(grad) / (iu * omega * mu);
}

Mat3 elastic_dyadic(const ElasticMaterial& m, double omega, const Eigen::Vector3d& d, double loss) {
  if (m.phase() != Phase::Solid) throw Error(ErrorKind::PhaseMismatch, "the elastic dyadic needs a solid");
  const ElasticWavenumbers k = elastic_wavenumbers(m, omega, loss);
  const cplx ks = *k.ks, kc = k.kc;
  const double r = distance(d);
  return (helmholtz_green(ks, r) * Mat3::Identity() + hessian(ks, d) / (ks * ks)) / m.mu -
         hessian(kc, d) / (m.gamma() * kc * kc);
}

Mat3 em_free_spectral_ge(cplx k, const SpectralPoint<double>& p, double dz) {
  if (dz == 0) throw Error(ErrorKind::CoincidentDepths, "z equals z'");
  const cplx kz = vertical_wavenumber(k, p.k_rho);
  const Vec n = symbol(p, kz, dz);
  return spectral_kernel(kz, dz) * (Mat3::Identity() + n * n.transpose() / (k * k));
}

Mat3 em_free_spectral_gh(cplx k, double omega, cplx mu, const SpectralPoint<double>& p, double dz) {
  if (dz == 0) throw Error(ErrorKind::CoincidentDepths, "z equals z'");
  const cplx kz = vertical_wavenumber(k, p.k_rho);
  const Vec grad = spectral_kernel(kz, dz) * symbol(p, kz, dz);
  return -cross_matrix(grad) / (iu * omega * mu);
}

Mat3 elastic_free_spectral(const ElasticMaterial& m, double omega, const SpectralPoint<double>& p, double dz,
                           double loss) {
  if (dz == 0) throw Error(ErrorKind::CoincidentDepths, "z equals z'");
  if (m.phase() != Phase::Solid) throw Error(ErrorKind::PhaseMismatch, "the elastic dyadic needs a solid");
  const ElasticWavenumbers k = elastic_wavenumbers(m, omega, loss);
  const cplx ks = *k.ks, kc = k.kc;
  const cplx ksz = vertical_wavenumber(ks, p.k_rho), kcz = vertical_wavenumber(kc, p.k_rho);
  const Vec ns = symbol(p, ksz, dz), nc = symbol(p, kcz, dz);
  return spectral_kernel(ksz, dz) * (Mat3::Identity() + ns * ns.transpose() / (ks * ks)) / m.mu -
         spectral_kernel(kcz, dz) * (nc * nc.transpose()) / (m.gamma() * kc * kc);
}

}  // namespace lmgf
