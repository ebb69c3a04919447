#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lmgf/elastic.hpp"
#include "lmgf/errors.hpp"
#include "lmgf/hankel.hpp"
#include "lmgf/maxwell.hpp"
#include "lmgf/oracle.hpp"
#include "lmgf/selfcheck.hpp"

namespace lmgf::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// one output row: leading coordinates, a status word, then the numeric payload
struct Row {
  std::vector<double> lead;
  std::string status = "ok";
  std::vector<double> data;
};

std::vector<std::string> tensor_columns() {
  std::vector<std::string> cols;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const std::string e = "g" + std::to_string(i) + std::to_string(j);
      cols.push_back("re_" + e);
      cols.push_back("im_" + e);
    }
  return cols;
}

std::vector<std::string> spectral_columns() {
  std::vector<std::string> cols = {"k_rho", "z", "status"};
  for (int i = 1; i <= 9; ++i) {
    cols.push_back("re_c" + std::to_string(i));
    cols.push_back("im_c" + std::to_string(i));
  }
  for (auto& c : tensor_columns()) cols.push_back(c);
  return cols;
}

std::vector<std::string> spatial_columns() {
  std::vector<std::string> cols = {"x", "y", "z", "status"};
  for (auto& c : tensor_columns()) cols.push_back(c);
  return cols;
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& cols, const std::vector<Row>& rows) {
  out << join(cols) << "\n";
  for (const Row& r : rows) {
    std::string line;
    for (double v : r.lead) line += format_number(v) + ",";
    line += r.status;
    for (double v : r.data) line += "," + format_number(v);
    out << line << "\n";
  }
}

void write_json(std::ostream& out, const std::vector<std::string>& cols, const std::vector<Row>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  const auto value = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  for (const Row& r : rows) {
    nlohmann::ordered_json o;
    size_t c = 0;
    for (double v : r.lead) o[cols[c++]] = value(v);
    o[cols[c++]] = r.status;
    for (double v : r.data) o[cols[c++]] = value(v);
    arr.push_back(o);
  }
  out << arr.dump(1) << "\n";
}

void emit(const RunConfig& config, const CliOptions& opt, const std::vector<std::string>& cols,
          const std::vector<Row>& rows) {
  const std::string path = opt.out_path.empty() ? config.output_path : opt.out_path;
  std::ostringstream buf;
  if (config.output_format == "json") write_json(buf, cols, rows);
  else write_csv(buf, cols, rows);
  if (path.empty()) {
    std::cout << buf.str();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output.path: cannot write '" + path + "'");
  f << buf.str();
}

// runs body(i) for i in [0, n) over a pool of workers; results land by index
template <typename Body>
void parallel_for(size_t n, int threads, Body body) {
  unsigned workers = threads > 0 ? unsigned(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<size_t>(n, 1));
  std::atomic<size_t> next{0};
  const auto run = [&] {
    for (size_t i = next++; i < n; i = next++) body(i);
  };
  if (workers <= 1) {
    run();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

void push_complex(std::vector<double>& v, cplx c) {
  v.push_back(c.real());
  v.push_back(c.imag());
}

std::vector<double> nan_payload(size_t n) { return std::vector<double>(n, kNaN); }

void fill_tensor(std::vector<double>& v, const Mat3& m) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) push_complex(v, m(i, j));
}

SourceKind source_kind(Problem p) { return p == Problem::ElasticVector ? SourceKind::Vector : SourceKind::Tensor; }

// production solution for either problem family
struct Spectral {
  std::optional<EmSpectralSolution> em;
  std::optional<ElasticSpectralSolution> el;

  AssembledTensor assemble(const SpectralPoint<double>& p, double z, Field field) const {
    if (em) return field == Field::GH ? assemble_gh(*em, p, z) : assemble_ge(*em, p, z);
    return assemble_g_elastic(*el, p, z);
  }
};

Spectral solve(const RunConfig& c, const LayerStack& stack, double k_rho, double z_src) {
  Spectral s;
  if (c.problem == Problem::Maxwell) s.em.emplace(solve_em_spectral(stack, c.omega, k_rho, z_src));
  else s.el.emplace(solve_elastic_spectral(stack, c.omega, k_rho, z_src, source_kind(c.problem)));
  return s;
}

}  // namespace

std::string spectral_header() { return join(spectral_columns()); }
std::string spatial_header() { return join(spatial_columns()); }

int cmd_spectral(const RunConfig& config, const CliOptions& opt, std::ostream& log) {
  if (config.k_rho.empty()) throw ConfigError("sweep.k_rho: spectral runs need at least one value");
  const LayerStack stack = config.stack();
  const size_t nz = config.target_z.size();
  const size_t width = 18 + 18;
  std::vector<Row> rows(config.k_rho.size() * nz);

  parallel_for(config.k_rho.size(), opt.threads, [&](size_t i) {
    const double kr = config.k_rho[i];
    const SpectralPoint<double> p = SpectralPoint<double>::from_polar(kr, config.alpha);
    for (size_t j = 0; j < nz; ++j) rows[i * nz + j].lead = {kr, config.target_z[j]};
    std::optional<Spectral> sol;
    try {
      sol.emplace(solve(config, stack, kr, config.source.z));
    } catch (const Error& e) {
      for (size_t j = 0; j < nz; ++j) {
        rows[i * nz + j].status = to_string(e.kind());
        rows[i * nz + j].data = nan_payload(width);
      }
      return;
    }
    for (size_t j = 0; j < nz; ++j) {
      Row& r = rows[i * nz + j];
      try {
        const AssembledTensor a = sol->assemble(p, config.target_z[j], config.field);
        for (int c = 1; c <= 9; ++c) push_complex(r.data, a.coeffs(c));
        fill_tensor(r.data, a.matrix);
      } catch (const Error& e) {
        r.status = to_string(e.kind());
        r.data = nan_payload(width);
      }
    }
  });

  emit(config, opt, spectral_columns(), rows);
  size_t flagged = 0;
  for (const Row& r : rows)
    if (r.status != "ok") {
      ++flagged;
      if (opt.verbose) log << "warning: k_rho=" << format_number(r.lead[0]) << " z=" << format_number(r.lead[1]) << " " << r.status << "\n";
    }
  if (flagged) log << "warning: " << flagged << " of " << rows.size() << " rows flagged\n";
  return flagged && opt.strict ? kSolverSingular : kOk;
}

int cmd_spatial(const RunConfig& config, const CliOptions& opt, std::ostream& log) {
  const LayerStack stack = config.stack();
  const Eigen::Vector3d src(config.source.x, config.source.y, config.source.z);
  std::vector<Row> rows(config.target_points.size());
  std::atomic<bool> nonconv{false}, other{false};

  parallel_for(rows.size(), opt.threads, [&](size_t i) {
    const Point3& t = config.target_points[i];
    Row& r = rows[i];
    r.lead = {t.x, t.y, t.z};
    try {
      fill_tensor(r.data, spatial_green(stack, config.omega, src, Eigen::Vector3d(t.x, t.y, t.z),
                                        config.spatial_field(), config.quadrature));
    } catch (const Error& e) {
      r.status = to_string(e.kind());
      r.data = nan_payload(18);
      (e.kind() == ErrorKind::NonConvergent ? nonconv : other) = true;
    }
  });

  emit(config, opt, spatial_columns(), rows);
  for (const Row& r : rows)
    if (r.status != "ok")
      log << "warning: target (" << format_number(r.lead[0]) << ", " << format_number(r.lead[1]) << ", "
          << format_number(r.lead[2]) << ") " << r.status << "\n";
  if (!opt.strict) return kOk;
  if (nonconv) return kQuadratureFailed;
  return other ? kSolverSingular : kOk;
}

namespace {

struct CheckStats {
  double value = 0;
  long samples = 0;
  void add(double v) {
    value = std::isnan(v) ? v : std::max(value, v);
    ++samples;
  }
};

struct PointReport {
  CheckStats interface_residual, radiation, b3_identity, rotation, class_mass, oracle;
  std::vector<std::string> warnings;
};

double restricted_distance(const BasisCoefficients<double>& a, const BasisCoefficients<double>& b,
                           const SpectralPoint<double>& p) {
  BasisCoefficients<double> ra, rb;
  for (int i = 1; i <= 5; ++i) {
    ra(i) = a(i);
    rb(i) = b(i);
  }
  const double n = weighted_norm(ra, p);
  return n > 0 ? weighted_distance(ra, rb, p) / n : weighted_distance(ra, rb, p);
}

double class_one_mass(const BasisCoefficients<double>& c, const SpectralPoint<double>& p) {
  double r = 0, i = 0;
  for (int k = 1; k <= 9; ++k) (k <= 5 ? r : i) += std::norm(c(k)) * basis_matrix<double>(k, p).squaredNorm();
  return r > 0 ? std::sqrt(i / r) : std::sqrt(i);
}

constexpr double kInterfaceTol = 1e-10;
constexpr double kB3Tol = 1e-6;
constexpr double kRotationTol = 1e-10;
constexpr double kOracleTol = 1e-9;
constexpr double kOracleCondition = 1e8;
constexpr double kRotationOffset = 1.1;

PointReport validate_point(const RunConfig& config, const LayerStack& stack, const std::vector<double>& targets,
                           double kr, const CliOptions& opt) {
  PointReport rep;
  const std::string at = "k_rho=" + format_number(kr);
  const double zs = config.source.z;
  const SpectralPoint<double> p1 = SpectralPoint<double>::from_polar(kr, config.alpha);
  const SpectralPoint<double> p2 = SpectralPoint<double>::from_polar(kr, config.alpha + kRotationOffset);

  Spectral sol;
  try {
    sol = solve(config, stack, kr, zs);
  } catch (const Error& e) {
    rep.warnings.push_back(at + ": " + e.what() + "; point skipped");
    return rep;
  }
  if (config.perturb_coefficients > 0) {
    if (sol.em) sol.em->perturb(config.perturb_coefficients, opt.seed);
    else sol.el->perturb(config.perturb_coefficients, opt.seed);
  }

  // interface conditions
  if (sol.em) {
    try {
      for (const auto& r : em_interface_residuals(*sol.em, p1)) rep.interface_residual.add(r.max_relative);
    } catch (const Error& e) {
      rep.warnings.push_back(at + ": interface residuals skipped, " + e.what());
    }
  } else {
    for (const auto& r : elastic_interface_residuals(*sol.el)) rep.interface_residual.add(r.max_relative);
  }

  // prohibited directions at the outer layers
  const int last = stack.num_layers() - 1;
  if (sol.em) {
    for (EmChannel c : {EmChannel::B1, EmChannel::B2, EmChannel::B3}) {
      rep.radiation.add(std::abs(sol.em->amplitude(c, 0, Direction::Down)));
      rep.radiation.add(std::abs(sol.em->amplitude(c, last, Direction::Up)));
    }
  } else {
    for (int slot = 1; slot <= 5; ++slot) {
      if (stack.phase(0) != Phase::Vacuum) rep.radiation.add(std::abs(sol.el->amplitude(0, slot, Direction::Down)));
      if (stack.phase(last) != Phase::Vacuum) rep.radiation.add(std::abs(sol.el->amplitude(last, slot, Direction::Up)));
    }
  }

  // b3 against a central difference of b2 in the source depth
  if (sol.em) {
    try {
      const EmLayer src = em_layer(stack, sol.em->source_layer(), config.omega);
      const double h = 1e-5 * 2 * M_PI / std::abs(src.k);
      const EmSpectralSolution plus = solve_em_spectral(stack, config.omega, kr, zs + h);
      const EmSpectralSolution minus = solve_em_spectral(stack, config.omega, kr, zs - h);
      double diff = 0, scale = 0;
      for (double z : targets) {
        if (std::abs(z - zs) < 100 * h) continue;
        const int t = stack.locate(z);
        const cplx b3 = sol.em->total(EmChannel::B3, z, t).v;
        const cplx fd = -(plus.total(EmChannel::B2, z, t).v - minus.total(EmChannel::B2, z, t).v) / (2 * h);
        diff = std::max(diff, std::abs(b3 - fd));
        scale = std::max(scale, std::abs(b3));
      }
      if (scale > 0) rep.b3_identity.add(diff / scale);
    } catch (const Error& e) {
      rep.warnings.push_back(at + ": b3 identity skipped, " + e.what());
    }
  }

  // rotation: the same coefficients must come back at a second azimuth
  if (kr > 1e-8) {
    for (double z : targets) {
      try {
        const Field f = config.problem == Problem::Maxwell ? Field::GE : Field::Elastic;
        const BasisCoefficients<double> c1 = decompose(sol.assemble(p1, z, f).matrix, p1);
        const BasisCoefficients<double> c2 = decompose(sol.assemble(p2, z, f).matrix, p2);
        rep.rotation.add(restricted_distance(c1, c2, p1));
        rep.class_mass.add(std::max(class_one_mass(c1, p1), class_one_mass(c2, p2)));
      } catch (const Error& e) {
        rep.warnings.push_back(at + " z=" + format_number(z) + ": rotation check skipped, " + e.what());
      }
    }
  }

  // independent full-tensor solve
  try {
    const FullTensorSolution o = sol.em ? oracle_em_full(stack, config.omega, p1, zs)
                                        : oracle_elastic_full(stack, config.omega, p1, zs, source_kind(config.problem));
    if (!(o.condition < kOracleCondition)) {
      rep.warnings.push_back(at + ": oracle condition " + format_number(o.condition) + ", comparison skipped");
    } else {
      for (double z : targets) {
        try {
          const int t = stack.locate(z);
          Mat3 ref, got;
          if (sol.em) {
            ref = config.field == Field::GH ? oracle_em_gh(o, z, t) : oracle_em_ge(o, z, t);
            got = sol.assemble(p1, z, config.field).matrix;
          } else {
            ref = oracle_elastic_g(o, z, t);
            got = sol.assemble(p1, z, Field::Elastic).matrix;
          }
          rep.oracle.add(rel_error(got, ref));
        } catch (const Error& e) {
          rep.warnings.push_back(at + " z=" + format_number(z) + ": oracle comparison skipped, " + e.what());
        }
      }
    }
  } catch (const Error& e) {
    rep.warnings.push_back(at + ": oracle " + e.what() + ", comparison skipped");
  }
  return rep;
}

// interior sample depths when the config lists none: layer midpoints and one
// point beyond each outer interface
std::vector<double> default_targets(const LayerStack& s) {
  const auto& d = s.interfaces();
  std::vector<double> z;
  if (d.empty()) return {0.25, -0.25};
  const double pad = std::max(0.5, 0.25 * s.geometry_scale());
  z.push_back(d.front() + pad);
  for (size_t i = 0; i + 1 < d.size(); ++i) z.push_back(0.5 * (d[i] + d[i + 1]));
  z.push_back(d.back() - pad);
  return z;
}

}  // namespace

int cmd_validate(const RunConfig& config, const CliOptions& opt, std::ostream& out, std::ostream& log) {
  const LayerStack stack = config.stack();
  const std::vector<double> k_rho = config.k_rho.empty() ? std::vector<double>{0.1, 1.0, 3.0} : config.k_rho;
  std::vector<double> targets;
  for (double z : config.target_z.empty() ? default_targets(stack) : config.target_z) {
    try {
      const int t = stack.locate(z);
      if (stack.phase(t) == Phase::Vacuum) continue;
      if (t == stack.locate(config.source.z) && std::abs(z - config.source.z) <= stack.eps_iface()) continue;
      targets.push_back(z);
    } catch (const Error& e) {
      log << "warning: target z=" << format_number(z) << " skipped, " << e.what() << "\n";
    }
  }

  std::vector<PointReport> reports(k_rho.size());
  parallel_for(k_rho.size(), opt.threads,
               [&](size_t i) { reports[i] = validate_point(config, stack, targets, k_rho[i], opt); });

  PointReport total;
  const auto merge = [](CheckStats& a, const CheckStats& b) {
    if (b.samples) a.value = std::isnan(b.value) ? b.value : std::max(a.value, b.value);
    a.samples += b.samples;
  };
  for (const PointReport& r : reports) {
    merge(total.interface_residual, r.interface_residual);
    merge(total.radiation, r.radiation);
    merge(total.b3_identity, r.b3_identity);
    merge(total.rotation, r.rotation);
    merge(total.class_mass, r.class_mass);
    merge(total.oracle, r.oracle);
    for (const auto& w : r.warnings) log << "warning: " << w << "\n";
  }

  bool ok = true;
  const auto line = [&](const char* name, const CheckStats& s, double tol) {
    char buf[160];
    if (!s.samples) {
      std::snprintf(buf, sizeof buf, "%-20s %-10s (tol %.1e) skipped\n", name, "-", tol);
    } else {
      const bool pass = s.value <= tol;
      ok = ok && pass;
      std::snprintf(buf, sizeof buf, "%-20s %.3e  (tol %.1e) %s  [%ld samples]\n", name, s.value, tol,
                    pass ? "ok" : "FAIL", s.samples);
    }
    out << buf;
  };
  line("interface residual", total.interface_residual, kInterfaceTol);
  line("radiation zeros", total.radiation, 0.0);
  if (config.problem == Problem::Maxwell) line("b3 identity", total.b3_identity, kB3Tol);
  line("rotation invariance", total.rotation, kRotationTol);
  line("class-I mass", total.class_mass, kRotationTol);
  line("oracle agreement", total.oracle, kOracleTol);
  out << (ok ? "validation passed" : "validation FAILED") << "\n";
  return ok ? kOk : kValidationFailed;
}

int cmd_selfcheck(const CliOptions& opt, std::ostream& out) {
  const SelfcheckReport rep = run_selfcheck(opt.seed);
  print_selfcheck(rep, out, opt.verbose);
  return rep.passed ? kOk : kValidationFailed;
}

}  // namespace lmgf::app
