#pragma once

// Homogeneous-space dyadics written straight from the scalar Helmholtz kernel,
// used to validate the layered solvers and the spatial quadrature.

#include "lmgf/basis.hpp"
#include "lmgf/stack.hpp"

namespace lmgf {

// g = exp(i k r) / (4 pi r)
cplx helmholtz_green(cplx k, double r);

// (I + grad grad / k^2) g at offset d = target - source
Mat3 em_electric_dyadic(cplx k, const Eigen::Vector3d& d);
// -(1 / (i omega mu)) [grad g]x, the curl partner of em_electric_dyadic
Mat3 em_magnetic_dyadic(cplx k, double omega, cplx mu, const Eigen::Vector3d& d);
// (1/mu)(I + grad grad / ks^2) gs - (1/gamma)(grad grad / kc^2) gc
Mat3 elastic_dyadic(const ElasticMaterial& m, double omega, const Eigen::Vector3d& d, double loss = 0);

// spectral free-space tensors at a point (z != z'); used as independent references
Mat3 em_free_spectral_ge(cplx k, const SpectralPoint<double>& p, double dz);
Mat3 em_free_spectral_gh(cplx k, double omega, cplx mu, const SpectralPoint<double>& p, double dz);
Mat3 elastic_free_spectral(const ElasticMaterial& m, double omega, const SpectralPoint<double>& p, double dz,
                           double loss = 0);

}  // namespace lmgf
