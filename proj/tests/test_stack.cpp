#include "doctest.h"

#include "lmgf/errors.hpp"
#include "lmgf/stack.hpp"

using namespace lmgf;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("locate_layer") {
  const LayerStack one({0.0}, {EmMaterial{}, EmMaterial{}});
  CHECK(one.locate(1.0) == 0);
  const LayerStack two({0.0, -2.0}, {EmMaterial{}, EmMaterial{}, EmMaterial{}});
  CHECK(two.locate(-1.0) == 1);
  CHECK(two.locate(-3.0) == 2);
  CHECK(kind_of([&] { one.locate(0.0); }) == ErrorKind::OnInterface);

  const double d = 10 * two.eps_iface();
  for (int l = 0; l < two.num_interfaces(); ++l) {
    CHECK(two.locate(two.interface(l) + d) == l);
    CHECK(two.locate(two.interface(l) - d) == l + 1);
  }
}

TEST_CASE("stack invariants") {
  CHECK(kind_of([] { LayerStack({0.0, 1.0}, {EmMaterial{}, EmMaterial{}, EmMaterial{}}); }) == ErrorKind::InvalidStack);
  CHECK(kind_of([] { LayerStack({0.0}, {EmMaterial{}}); }) == ErrorKind::InvalidStack);
  CHECK(kind_of([] { LayerStack({0.0}, {EmMaterial{}, ElasticMaterial{1, 1, 1}}); }) == ErrorKind::InvalidStack);
  CHECK(kind_of([] { LayerStack({0.0}, {EmMaterial{}, Vacuum{}}); }) == ErrorKind::InvalidStack);
  CHECK(kind_of([] { LayerStack({}, {EmMaterial{0.0, 1.0}}); }) == ErrorKind::InvalidMaterial);
  CHECK(kind_of([] { LayerStack({}, {ElasticMaterial{1.0, -1.0, 1.0}}); }) == ErrorKind::InvalidMaterial);
  // vacuum only at the ends
  CHECK(kind_of([] {
          LayerStack({1.0, 0.0}, {ElasticMaterial{1, 2, 1}, Vacuum{}, ElasticMaterial{1, 2, 1}});
        }) == ErrorKind::InvalidStack);
  const LayerStack ok({1.0, 0.0}, {Vacuum{}, ElasticMaterial{1, 2, 1}, Vacuum{}});
  CHECK(ok.kind() == ProblemKind::Elastic);
  CHECK(ok.phase(0) == Phase::Vacuum);
  CHECK(ok.phase(1) == Phase::Solid);
}

TEST_CASE("wavenumbers") {
  CHECK(std::abs(em_wavenumber(EmMaterial{1, 1}, 2.0) - 2.0) <= 1e-15);
  const auto solid = elastic_wavenumbers(ElasticMaterial{1, 2, 1}, 1.0);
  REQUIRE(solid.ks.has_value());
  CHECK(std::abs(*solid.ks - 1.0) <= 1e-15);
  CHECK(std::abs(solid.kc - 0.5) <= 1e-15);
  const auto fluid = elastic_wavenumbers(ElasticMaterial{1, 1, 0}, 1.0);
  CHECK_FALSE(fluid.ks.has_value());
  CHECK(std::abs(fluid.kc - 1.0) <= 1e-15);
  CHECK(phase_of(ElasticMaterial{1, 1, 0}) == Phase::Fluid);
  CHECK(kind_of([] { wavenumbers(Vacuum{}, 1.0); }) == ErrorKind::VacuumHasNoWavenumber);
  // loss moves k into the upper half plane
  CHECK(em_wavenumber(EmMaterial{1, 1}, 1.0, 1e-3).imag() > 0);
}

TEST_CASE("vertical wavenumber branch") {
  CHECK(std::abs(vertical_wavenumber(2.0, 1.0) - std::sqrt(3.0)) <= 1e-15);
  CHECK(std::abs(vertical_wavenumber(1.0, 2.0) - cplx(0, std::sqrt(3.0))) <= 1e-15);
  CHECK(vertical_wavenumber(1.0, 1.0) == cplx(0));

  // k_z^2 = k^2 - k_rho^2 and |exp(i kz z)| <= 1 for z >= 0 under loss
  const cplx k = cplx(1.0, 0.0) * cplx(1.0, 1e-3);
  for (int i = 0; i <= 400; ++i) {
    const double kr = 10.0 * i / 400.0;
    const cplx kz = vertical_wavenumber(k, kr);
    CHECK(std::abs(kz * kz - (k * k - kr * kr)) <= 1e-13 * (1 + kr * kr));
    CHECK(kz.real() >= 0);
    CHECK(std::abs(std::exp(iu * kz * 3.0)) <= 1.0);
  }
}

TEST_CASE("local references keep exponentials bounded") {
  const LayerStack s({1.0, 0.0, -2.0}, {EmMaterial{}, EmMaterial{2, 1}, EmMaterial{3, 1}, EmMaterial{}});
  for (int t = 0; t < s.num_layers(); ++t) {
    const cplx kz = vertical_wavenumber(em_wavenumber(std::get<EmMaterial>(s.material(t)), 1.0, 1e-3), 4.0);
    for (double z : {3.0, 0.5, -1.0, -5.0}) {
      if (s.locate(z) != t) continue;
      // radiation removes up waves in the bottom layer and down waves in the top one
      if (t != s.num_layers() - 1) CHECK(std::abs(std::exp(iu * kz * (z - s.up_reference(t)))) <= 1.0);
      if (t != 0) CHECK(std::abs(std::exp(-iu * kz * (z - s.down_reference(t)))) <= 1.0);
    }
  }
}
