// One line per acceptance criterion; exits non-zero if any of them fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "lmgf/closed_form.hpp"
#include "lmgf/hankel.hpp"
#include "lmgf/maxwell.hpp"
#include "lmgf/oracle.hpp"
#include "random_stacks.hpp"

using namespace lmgf;
using lmgf::testing::Scenario;
using P = SpectralPoint<double>;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// running maximum against a fixed tolerance
struct Worst {
  double value = 0;
  long samples = 0;
  void add(double v) {
    ++samples;
    if (!(v <= value)) value = v;  // NaN sticks
  }
  bool within(double tol) const { return samples > 0 && value <= tol; }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double class_one_mass(const BasisCoefficients<double>& c, const P& p) {
  double r = 0, i = 0;
  for (int k = 1; k <= 9; ++k) (k <= 5 ? r : i) += std::norm(c(k)) * basis_matrix(k, p).squaredNorm();
  return r > 0 ? std::sqrt(i / r) : std::sqrt(i);
}

double restricted_change(const BasisCoefficients<double>& a, const BasisCoefficients<double>& b, const P& p) {
  BasisCoefficients<double> ra, rb;
  for (int i = 1; i <= 5; ++i) {
    ra(i) = a(i);
    rb(i) = b(i);
  }
  const double n = weighted_norm(ra, p);
  return n > 0 ? weighted_distance(ra, rb, p) / n : 0.0;
}

Outcome product_table() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI), logk(-3.0, 1.5);
  double worst = 0;  // error over its allowance
  for (int s = 0; s < 200; ++s) {
    const P p = P::from_polar(std::pow(10.0, logk(rng)), angle(rng));
    const double allow = 1e-13 * (1 + std::pow(p.k_rho, 4));
    for (int u = 1; u <= 9; ++u)
      for (int v = 1; v <= 9; ++v) {
        using B = BasisCoefficients<double>;
        const Mat3 via_table = realize(multiply_in_basis(B::unit(u), B::unit(v), cplx(p.k_rho_sq())), p);
        const Mat3 direct = basis_matrix(u, p) * basis_matrix(v, p);
        worst = std::max(worst, (via_table - direct).cwiseAbs().maxCoeff() / allow);
      }
  }
  const double t = seconds_since(t0);
  return {worst <= 1.0 && t < 1.0, fmt("worst error / allowance %.2e, %.3f s", worst, t)};
}

Outcome filtering() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  Worst mass, rotation;
  int stacks = 0, skipped = 0;
  const auto check_tensor = [&](const FullTensorSolution& a, const FullTensorSolution& b) {
    for (int t = 0; t < a.stack.num_layers(); ++t)
      for (Direction d : {Direction::Up, Direction::Down}) {
        const Mat3 ma = oracle_layer_tensor(a, t, d), mb = oracle_layer_tensor(b, t, d);
        if (ma.isZero(0.0)) continue;
        const auto ca = decompose(ma, a.point), cb = decompose(mb, b.point);
        mass.add(std::max(class_one_mass(ca, a.point), class_one_mass(cb, b.point)));
        rotation.add(restricted_change(ca, cb, a.point));
      }
  };
  const auto check_vector = [&](const FullTensorSolution& a, const FullTensorSolution& b) {
    for (int t = 0; t < a.stack.num_layers(); ++t)
      for (Direction d : {Direction::Up, Direction::Down}) {
        const Mat3 ma = oracle_layer_tensor(a, t, d), mb = oracle_layer_tensor(b, t, d);
        if (ma.isZero(0.0)) continue;
        const auto va = decompose_vector<double>(ma.col(2), a.point);
        const auto vb = decompose_vector<double>(mb.col(2), b.point);
        const auto& p = a.point;
        const double j2 = vector_basis(2, p).norm(), j3 = vector_basis(3, p).norm(), j7 = vector_basis(7, p).norm();
        const double r = std::hypot(std::abs(va.c2) * j2, std::abs(va.c3) * j3);
        if (r == 0) continue;
        mass.add(std::abs(va.c7) * j7 / r);
        rotation.add(std::hypot(std::abs(va.c2 - vb.c2) * j2, std::abs(va.c3 - vb.c3) * j3) / r);
        mass.add(std::abs(vb.c7) * j7 / std::hypot(std::abs(vb.c2) * j2, std::abs(vb.c3) * j3));
      }
  };
  for (int n = 0; n < 150; ++n) {
    const int family = n % 3;
    const Scenario s = family == 0   ? lmgf::testing::random_em(rng)
                       : family == 1 ? lmgf::testing::random_elastic(rng, SourceKind::Tensor)
                                     : lmgf::testing::random_elastic(rng, SourceKind::Vector);
    ++stacks;
    for (double kr : {0.1, 1.0, 3.0}) {
      const P p1 = P::from_polar(kr, 0.3), p2 = P::from_polar(kr, 2.2);
      try {
        if (family == 0) {
          check_tensor(oracle_em_full(s.stack, 1.0, p1, s.z_src), oracle_em_full(s.stack, 1.0, p2, s.z_src));
        } else {
          const auto a = oracle_elastic_full(s.stack, 1.0, p1, s.z_src, s.kind);
          const auto b = oracle_elastic_full(s.stack, 1.0, p2, s.z_src, s.kind);
          family == 1 ? check_tensor(a, b) : check_vector(a, b);
        }
      } catch (const Error&) {
        ++skipped;
      }
    }
  }
  const double t = seconds_since(t0);
  return {mass.within(1e-10) && rotation.within(1e-10) && t < 60.0,
          fmt("%d stacks, class-I mass %.2e, azimuth change %.2e, %ld tensors, %d singular skips, %.1f s", stacks,
              mass.value, rotation.value, mass.samples, skipped, t)};
}

Outcome residuals() {
  std::mt19937_64 rng(202);
  Worst interface;
  double radiation = 0;
  long zeros = 0;
  for (int n = 0; n < 30; ++n) {
    const Scenario s = lmgf::testing::random_em(rng);
    const int last = s.stack.num_layers() - 1;
    for (double kr : {0.1, 1.0, 3.0}) {
      const auto sol = solve_em_spectral(s.stack, 1.0, kr, s.z_src);
      for (const auto& r : em_interface_residuals(sol, P::from_polar(kr, 0.7))) interface.add(r.max_relative);
      for (EmChannel c : {EmChannel::B1, EmChannel::B2, EmChannel::B3}) {
        radiation = std::max({radiation, std::abs(sol.amplitude(c, 0, Direction::Down)),
                              std::abs(sol.amplitude(c, last, Direction::Up))});
        zeros += 2;
      }
    }
  }
  for (int n = 0; n < 40; ++n) {
    const SourceKind kind = n % 2 ? SourceKind::Vector : SourceKind::Tensor;
    const Scenario s = lmgf::testing::random_elastic(rng, kind);
    const int last = s.stack.num_layers() - 1;
    for (double kr : {0.1, 1.0, 3.0}) {
      const auto sol = solve_elastic_spectral(s.stack, 1.0, kr, s.z_src, kind);
      for (const auto& r : elastic_interface_residuals(sol)) interface.add(r.max_relative);
      for (int slot = 1; slot <= 5; ++slot) {
        if (s.stack.phase(0) != Phase::Vacuum) {
          radiation = std::max(radiation, std::abs(sol.amplitude(0, slot, Direction::Down)));
          ++zeros;
        }
        if (s.stack.phase(last) != Phase::Vacuum) {
          radiation = std::max(radiation, std::abs(sol.amplitude(last, slot, Direction::Up)));
          ++zeros;
        }
      }
    }
  }
  return {interface.within(1e-10) && radiation == 0.0,
          fmt("interface %.2e over %ld interfaces, prohibited amplitudes max %.1e over %ld", interface.value,
              interface.samples, radiation, zeros)};
}

Outcome b3_identity() {
  std::mt19937_64 rng(303);
  Worst err;
  for (int n = 0; n < 30; ++n) {
    const Scenario s = lmgf::testing::random_em(rng);
    for (double kr : {0.1, 1.0, 3.0}) {
      const auto sol = solve_em_spectral(s.stack, 1.0, kr, s.z_src);
      const double h = 1e-5 * 2 * M_PI / std::abs(sol.layer(sol.source_layer()).k);
      const auto plus = solve_em_spectral(s.stack, 1.0, kr, s.z_src + h);
      const auto minus = solve_em_spectral(s.stack, 1.0, kr, s.z_src - h);
      for (double z : s.targets) {
        if (std::abs(z - s.z_src) < 100 * h) continue;
        const int t = s.stack.locate(z);
        const cplx b3 = sol.total(EmChannel::B3, z, t).v;
        const cplx fd = -(plus.total(EmChannel::B2, z, t).v - minus.total(EmChannel::B2, z, t).v) / (2 * h);
        err.add(std::abs(b3 - fd) / std::abs(b3));
      }
    }
  }
  return {err.within(1e-6), fmt("max relative %.2e over %ld samples", err.value, err.samples)};
}

Outcome halfspace() {
  Worst err;
  const double w = 1.0;
  const auto sweep = [](double kmin, double kmax) {
    std::vector<double> k;
    for (int i = 0; i <= 40; ++i) k.push_back(0.99 * kmin * i / 40);
    for (double f : {0.5, 0.8, 1.05, 1.5, 2.0, 4.0}) k.push_back(kmin + f * (kmax - kmin + 1.0));
    return k;
  };
  const std::vector<std::pair<EmMaterial, EmMaterial>> em = {{{1, 1}, {4, 1}}, {{2.5, 1.5}, {1, 1}}, {{1, 3}, {2, 0.7}}};
  for (const auto& [up, lo] : em) {
    const LayerStack s({0.0}, {up, lo});
    const double k0 = std::abs(em_wavenumber(up, w)), k1 = std::abs(em_wavenumber(lo, w));
    for (double kr : sweep(std::min(k0, k1), std::max(k0, k1))) {
      const auto sol = solve_em_spectral(s, w, kr, 0.5);
      const auto r = [&](EmChannel c) { return sol.reaction(c, 0.0, 0).v / sol.free_part(c, 0.0).v; };
      const cplx te = oracle_halfspace_reflection(HalfspaceMode::TE, up, lo, w, kr);
      const cplx tm = oracle_halfspace_reflection(HalfspaceMode::TM, up, lo, w, kr);
      err.add(std::abs(r(EmChannel::B1) - te) / std::abs(te));
      err.add(std::abs(r(EmChannel::B2) - tm) / std::abs(tm));
    }
  }
  const std::vector<std::pair<ElasticMaterial, ElasticMaterial>> ac = {{{1, 1, 0}, {2.5, 4, 0}}, {{1.8, 5, 0}, {1, 1.2, 0}}};
  for (const auto& [up, lo] : ac) {
    const LayerStack s({0.0}, {up, lo});
    const double zs = 0.5;
    const ElasticLayer L0 = elastic_layer(s, 0, w), L1 = elastic_layer(s, 1, w);
    const double k0 = std::abs(L0.kc), k1 = std::abs(L1.kc);
    for (double kr : sweep(std::min(k0, k1), std::max(k0, k1))) {
      const auto sol = solve_elastic_spectral(s, w, kr, zs, SourceKind::Vector);
      const cplx kz0 = vertical_wavenumber(L0.kc, kr);
      const cplx incident = iu / (2.0 * w * w * up.rho * kz0) * std::exp(iu * kz0 * zs);
      const cplx got = std::get<FluidCoefficients>(sol.coefficients(0)).u[0] / incident;
      const cplx ref = oracle_halfspace_reflection(HalfspaceMode::Acoustic, up, lo, w, kr);
      err.add(std::abs(got - ref) / std::abs(ref));
    }
  }
  return {err.within(1e-12), fmt("max relative %.2e over %ld TE/TM/acoustic samples", err.value, err.samples)};
}

Outcome cross_solver() {
  std::mt19937_64 rng(404);
  Worst em, tensor, vector;
  int ill = 0;
  for (int n = 0; n < 90; ++n) {
    const int family = n % 3;
    const Scenario s = family == 0   ? lmgf::testing::random_em(rng)
                       : family == 1 ? lmgf::testing::random_elastic(rng, SourceKind::Tensor)
                                     : lmgf::testing::random_elastic(rng, SourceKind::Vector);
    for (double kr : {0.1, 1.0, 3.0}) {
      const P p = P::from_polar(kr, 0.9);
      try {
        if (family == 0) {
          const auto sol = solve_em_spectral(s.stack, 1.0, kr, s.z_src);
          const auto o = oracle_em_full(s.stack, 1.0, p, s.z_src);
          if (!(o.condition < 1e8)) {
            ++ill;
            continue;
          }
          for (double z : s.targets) {
            const int t = s.stack.locate(z);
            em.add(rel_error(assemble_ge(sol, p, z).matrix, oracle_em_ge(o, z, t)));
            em.add(rel_error(assemble_gh(sol, p, z).matrix, oracle_em_gh(o, z, t)));
          }
        } else {
          const auto sol = solve_elastic_spectral(s.stack, 1.0, kr, s.z_src, s.kind);
          const auto o = oracle_elastic_full(s.stack, 1.0, p, s.z_src, s.kind);
          if (!(o.condition < 1e8)) {
            ++ill;
            continue;
          }
          for (double z : s.targets)
            (family == 1 ? tensor : vector)
                .add(rel_error(assemble_g_elastic(sol, p, z).matrix, oracle_elastic_g(o, z, s.stack.locate(z))));
        }
      } catch (const Error&) {
        ++ill;
      }
    }
  }
  return {em.within(1e-9) && tensor.within(1e-9) && vector.within(1e-9),
          fmt("EM %.2e, elastic tensor %.2e, vector %.2e over %ld points, %d ill-conditioned skipped", em.value,
              tensor.value, vector.value, em.samples + tensor.samples + vector.samples, ill)};
}

std::vector<Eigen::Vector3d> shell(int n, double r_min, double r_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Eigen::Vector3d> out;
  for (int i = 0; i < n; ++i) {
    const double r = r_min + (r_max - r_min) * i / (n - 1);
    const double el = (0.2 + 1.2 * u(rng)) * (i % 2 ? 1 : -1);
    const double az = 2 * M_PI * u(rng);
    out.emplace_back(r * std::cos(el) * std::cos(az), r * std::cos(el) * std::sin(az), r * std::sin(el));
  }
  return out;
}

Outcome spatial() {
  QuadratureSpec spec;
  spec.loss = 1e-5;
  const double w = 1.0;
  const EmMaterial em{2, 1.5};
  const ElasticMaterial el{2, 3, 1};
  const Eigen::Vector3d src(0.1, 0.2, -0.3);
  Worst ge, gh, g;

  auto t0 = std::chrono::steady_clock::now();
  const LayerStack se({}, {em});
  const cplx k = em_wavenumber(em, w, spec.loss);
  const double lambda = 2 * M_PI / k.real();
  for (const auto& d : shell(20, 0.5 * lambda, 5 * lambda, 21)) {
    ge.add(rel_error(spatial_green(se, w, src, src + d, Field::GE, spec), em_electric_dyadic(k, d)));
    gh.add(rel_error(spatial_green(se, w, src, src + d, Field::GH, spec), em_magnetic_dyadic(k, w, em.mu, d)));
  }
  const double t_em = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const LayerStack ss({}, {el});
  const double lambda_s = 2 * M_PI / elastic_wavenumbers(el, w).ks->real();
  for (const auto& d : shell(20, 0.5 * lambda_s, 5 * lambda_s, 22))
    g.add(rel_error(spatial_green(ss, w, src, src + d, Field::Elastic, spec), elastic_dyadic(el, w, d, spec.loss)));
  const double t_el = seconds_since(t0);

  return {ge.within(1e-5) && gh.within(1e-5) && g.within(1e-5) && t_em < 30 && t_el < 30,
          fmt("GE %.2e, GH %.2e, elastic %.2e at 20 targets each, %.1f s and %.1f s", ge.value, gh.value, g.value,
              t_em, t_el)};
}

Outcome potentials() {
  std::mt19937_64 rng(505);
  Worst err;
  long bad_pattern = 0, patterns = 0;
  for (int n = 0; n < 30; ++n) {
    const Scenario s = lmgf::testing::random_em(rng);
    for (double kr : {0.1, 1.0, 3.0}) {
      const auto sol = solve_em_spectral(s.stack, 1.0, kr, s.z_src);
      const P p = P::from_polar(kr, 1.0);
      for (double z : s.targets) {
        const int t = s.stack.locate(z);
        const Mat3 ge = assemble_ge(sol, p, z).matrix;
        const cplx k = sol.layer(t).k;
        const auto at = transverse_potential(sol, z), as = sommerfeld_potential(sol, z);
        err.add(rel_error(realize(apply_electric_operator(at, k, 1.0, kr), p), ge));
        err.add(rel_error(realize(apply_electric_operator(as, k, 1.0, kr), p), ge));

        // transverse: the xy block and (3,3); Sommerfeld: the diagonal and the rest of the third row
        using Mask = Eigen::Matrix<bool, 3, 3>;
        Mask transverse, sommerfeld;
        transverse << 1, 1, 0, 1, 1, 0, 0, 0, 1;
        sommerfeld << 1, 0, 0, 0, 1, 0, 1, 1, 1;
        const auto nonzero = [](const Mat3& m) { return Mask((m.cwiseAbs().array() > 0).matrix()); };
        patterns += 2;
        bad_pattern += nonzero(realize(at.v, p)) != transverse;
        bad_pattern += nonzero(realize(as.v, p)) != sommerfeld;
      }
    }
  }
  return {err.within(1e-10) && bad_pattern == 0,
          fmt("operator mismatch %.2e, %ld of %ld sparsity patterns wrong", err.value, bad_pattern, patterns)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(LMGF_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = "acceptance_cli";
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({
  "schema_version": 1, "problem": "elastic-tensor", "omega": 1.0,
  "stack": {"interfaces": [1.0, 0.0, -1.0],
            "layers": [{"vacuum": true}, {"rho": 2, "lambda": 3, "mu": 1}, {"rho": 1, "lambda": 2, "mu": 0}, {"rho": 3, "lambda": 5, "mu": 2.5}]},
  "source": {"x": 0.0, "y": 0.0, "z": 0.5},
  "sweep": {"k_rho": {"start": 0.0, "stop": 3.0, "count": 16}, "alpha": 0.4},
  "targets": {"z": [0.8, 0.2, -0.5, -2.0],
              "points": [[1.0, 0.5, 0.2], [-0.4, 2.0, -0.6]]}
})";
  const std::string cfg = "--config " + (dir / "run.json").string() + " --seed 42";
  int codes = 0;
  for (const char* name : {"spectral_a.csv", "spectral_b.csv"})
    codes += run_cli("spectral " + cfg + " --threads 3 --out " + (dir / name).string());
  for (const char* name : {"spatial_a.csv", "spatial_b.csv"})
    codes += run_cli("spatial " + cfg + " --out " + (dir / name).string());
  const std::string sa = slurp(dir / "spectral_a.csv"), pa = slurp(dir / "spatial_a.csv");
  const bool same = !sa.empty() && sa == slurp(dir / "spectral_b.csv") && !pa.empty() && pa == slurp(dir / "spatial_b.csv");
  const auto head = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  const fs::path golden = LMGF_GOLDEN_DIR;
  const bool headers = head(sa) == head(slurp(golden / "spectral_header.csv")) &&
                       head(pa) == head(slurp(golden / "spatial_header.csv")) &&
                       lmgf::app::spectral_header() == head(sa) && lmgf::app::spatial_header() == head(pa);
  return {codes == 0 && same && headers, fmt("exit codes %s, repeat runs %s, golden headers %s", codes ? "nonzero" : "0",
                                             same ? "identical" : "DIFFER", headers ? "match" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"product table", product_table},
      {"filtering by oracle", filtering},
      {"interface and radiation residuals", residuals},
      {"b3 identity", b3_identity},
      {"half-space reflection", halfspace},
      {"cross-solver agreement", cross_solver},
      {"spatial free-space dyadics", spatial},
      {"potential recovery", potentials},
      {"CLI determinism and headers", determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.ok;
    std::printf("[%s] %zu %-34s %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
