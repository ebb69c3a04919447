#include "lmgf/hankel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "lmgf/elastic.hpp"
#include "lmgf/errors.hpp"
#include "lmgf/maxwell.hpp"

namespace lmgf {

namespace detail {

namespace {

// Gauss-Kronrod 7/15 on [-1, 1]
constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  Channels value;
  double error;
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

Segment kronrod(const std::function<Channels(double)>& f, int channels, double a, double b, long& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Channels k = Channels::Zero(channels), g = Channels::Zero(channels);
  for (int i = 0; i < 8; ++i) {
    if (i == 7) {
      const Channels fc = f(c);
      k += kWk[7] * fc;
      g += kWg[3] * fc;
      ++evals;
      continue;
    }
    const Channels f1 = f(c - h * kXk[i]), f2 = f(c + h * kXk[i]);
    evals += 2;
    k += kWk[i] * (f1 + f2);
    if (i % 2 == 1) g += kWg[i / 2] * (f1 + f2);
  }
  Segment s{a, b, k * h, 0};
  s.error = (s.value - g * h).cwiseAbs().maxCoeff();
  return s;
}

// global adaptive bisection until the summed error estimate meets tol * max(|I|, floor)
Channels adaptive(const std::function<Channels(double)>& f, int channels, const std::vector<double>& nodes,
                  double rel_tol, double floor, long& evals, long max_evals) {
  std::priority_queue<Segment, std::vector<Segment>, ByError> queue;
  Channels total = Channels::Zero(channels);
  double err = 0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    Segment s = kronrod(f, channels, nodes[i], nodes[i + 1], evals);
    total += s.value;
    err += s.error;
    queue.push(std::move(s));
  }
  while (!queue.empty() && err > rel_tol * std::max(total.cwiseAbs().maxCoeff(), floor)) {
    if (evals > max_evals) throw Error(ErrorKind::NonConvergent, "quadrature exceeded its evaluation budget");
    Segment s = queue.top();
    queue.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) continue;  // interval exhausted at machine precision
    Segment l = kronrod(f, channels, s.a, m, evals), r = kronrod(f, channels, m, s.b, evals);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    queue.push(std::move(l));
    queue.push(std::move(r));
  }
  return total;
}

}  // namespace

QuadratureResult integrate_radial(const std::function<Channels(double)>& f, int channels,
                                  std::vector<double> breakpoints, double k_max, double tail_width,
                                  const QuadratureSpec& spec) {
  if (!(k_max > 0) || !(tail_width > 0)) throw Error(ErrorKind::InvalidArgument, "quadrature needs k_max > 0");
  if (!(spec.rel_tol > 0 && spec.rel_tol <= 1e-2)) throw Error(ErrorKind::InvalidArgument, "rel_tol must be in (0, 1e-2]");
  std::vector<double> cuts{0.0};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints)
    if (b > cuts.back() && b < k_max) cuts.push_back(b);
  cuts.push_back(k_max);
  std::vector<double> nodes;
  const int panels = std::max(1, spec.panels);
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    for (int j = 0; j < panels; ++j) nodes.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * j / panels);
  nodes.push_back(k_max);

  QuadratureResult out;
  out.value = adaptive(f, channels, nodes, spec.rel_tol, 0.0, out.evaluations, spec.max_evaluations);

  // tail: panels until three in a row are negligible against the running total
  int quiet = 0;
  double a = k_max;
  for (int panel = 0; quiet < 3; ++panel) {
    if (panel >= 4000) throw Error(ErrorKind::NonConvergent, "radial tail does not decay");
    const double scale = out.value.cwiseAbs().maxCoeff();
    const Channels piece = adaptive(f, channels, {a, a + tail_width}, spec.rel_tol, scale, out.evaluations,
                                    spec.max_evaluations);
    out.value += piece;
    quiet = piece.cwiseAbs().maxCoeff() <= spec.rel_tol * out.value.cwiseAbs().maxCoeff() ? quiet + 1 : 0;
    a += tail_width;
  }
  return out;
}

}  // namespace detail

cplx inverse_radial_transform(const RadialIntegrand& in, const QuadratureSpec& spec) {
  if (in.order < 0 || in.order > 2) throw Error(ErrorKind::InvalidArgument, "Bessel order must be 0, 1 or 2");
  if (!(in.rho >= 0)) throw Error(ErrorKind::InvalidArgument, "rho must be >= 0");
  if (!(spec.k_max > 0)) throw Error(ErrorKind::InvalidArgument, "a standalone transform needs spec.k_max");
  if (in.order > 0 && in.rho == 0) return 0.0;
  const auto f = [&](double k) {
    detail::Channels v(1);
    v(0) = in.f(k) * std::cyl_bessel_j(in.order, k * in.rho) * k / (2 * M_PI);
    return v;
  };
  return detail::integrate_radial(f, 1, in.breakpoints, spec.k_max, spec.k_max / spec.truncation_factor, spec).value(0);
}

namespace {

// channel order: I0 c1, I0 c2, I0 c9, I1 k c3, I1 k c4, I1 k c6, I1 k c7, I0 n5, I2 n5, I0 n8, I2 n8
constexpr int kChannels = 11;
constexpr std::array<int, kChannels> kOrder = {0, 0, 0, 1, 1, 1, 1, 0, 2, 0, 2};

struct Spectral {
  BasisCoefficients<double> c;
  cplx n5{0}, n8{0};
};

}  // namespace

Mat3 detail::assemble_spatial(const Channels& I, double phi) {
  const double c = std::cos(phi), s = std::sin(phi), c2 = std::cos(2 * phi), s2 = std::sin(2 * phi);
  Mat3 g = Mat3::Zero();
  // J1, J2, J9
  g(0, 0) += I(0);
  g(1, 1) += I(0);
  g(2, 2) += I(1);
  g(0, 1) += I(2);
  g(1, 0) -= I(2);
  // J3 and J4: i kx -> -cos(phi) I1, i ky -> -sin(phi) I1
  g(0, 2) -= c * I(3);
  g(1, 2) -= s * I(3);
  g(2, 0) -= c * I(4);
  g(2, 1) -= s * I(4);
  // J6 row 3 = (-i ky, i kx, 0), J7 column 3 = (i ky, -i kx, 0)
  g(2, 0) += s * I(5);
  g(2, 1) -= c * I(5);
  g(0, 2) -= s * I(6);
  g(1, 2) += c * I(6);
  // unit-direction J5 = -khat khat^T
  g(0, 0) -= 0.5 * (I(7) - c2 * I(8));
  g(1, 1) -= 0.5 * (I(7) + c2 * I(8));
  g(0, 1) += 0.5 * s2 * I(8);
  g(1, 0) += 0.5 * s2 * I(8);
  // unit-direction J8 = [[ca sa, sa^2], [-ca^2, -ca sa]]
  g(0, 0) -= 0.5 * s2 * I(10);
  g(0, 1) += 0.5 * (I(9) + c2 * I(10));
  g(1, 0) -= 0.5 * (I(9) - c2 * I(10));
  g(1, 1) += 0.5 * s2 * I(10);
  return g;
}


Mat3 spatial_green(const LayerStack& stack_in, double omega, const Eigen::Vector3d& source,
                   const Eigen::Vector3d& target, Field which, const QuadratureSpec& spec) {
  const LayerStack stack = [&] {
    std::vector<Material> mats;
    for (int t = 0; t < stack_in.num_layers(); ++t) mats.push_back(stack_in.material(t));
    return LayerStack(stack_in.interfaces(), mats, std::max(stack_in.loss(), spec.loss));
  }();
  if ((which == Field::Elastic) != (stack.kind() == ProblemKind::Elastic))
    throw Error(ErrorKind::InvalidArgument, "field does not match the stack kind");
  const double zs = source(2), z = target(2);
  const int t = stack.locate(z);
  const int src = stack.locate(zs);
  // the spectral integrand is only absolutely convergent off the source plane
  if (t == src && std::abs(z - zs) <= stack.eps_iface())
    throw Error(ErrorKind::CoincidentDepths, "target shares the source depth");
  const double dx = target(0) - source(0), dy = target(1) - source(1);
  const double rho = std::hypot(dx, dy);
  const double phi = rho > 0 ? std::atan2(dy, dx) : 0.0;

  SourceKind kind = SourceKind::Tensor;
  if (which == Field::Elastic && stack.phase(src) == Phase::Fluid) kind = SourceKind::Vector;

  const auto spectral = [&](double k) {
    const auto p = SpectralPoint<double>::from_polar(k, 0.0);
    Spectral s;
    if (which == Field::Elastic) {
      const AssembledTensor a = assemble_g_elastic(solve_elastic_spectral(stack, omega, k, zs, kind), p, z, t);
      s.c = a.coeffs;
      s.n5 = a.n5;
    } else {
      const EmSpectralSolution sol = solve_em_spectral(stack, omega, k, zs);
      const AssembledTensor a = which == Field::GE ? assemble_ge(sol, p, z, t) : assemble_gh(sol, p, z, t);
      s.c = a.coeffs;
      s.n5 = a.n5;
      s.n8 = a.n8;
    }
    return s;
  };
  const auto integrand = [&](double k) {
    const Spectral s = spectral(k);
    detail::Channels v(kChannels);
    v << s.c(1), s.c(2), s.c(9), k * s.c(3), k * s.c(4), k * s.c(6), k * s.c(7), s.n5, s.n5, s.n8, s.n8;
    const double w = k / (2 * M_PI);
    const std::array<double, 3> J = {std::cyl_bessel_j(0, k * rho), std::cyl_bessel_j(1, k * rho),
                                     std::cyl_bessel_j(2, k * rho)};
    for (int i = 0; i < kChannels; ++i) v(i) *= w * J[kOrder[i]];
    return v;
  };

  const double kmax_material = stack.max_wavenumber(omega);
  std::vector<double> breaks;
  for (int l = 0; l < stack.num_layers(); ++l) {
    const Material& m = stack.material(l);
    if (const auto* em = std::get_if<EmMaterial>(&m)) breaks.push_back(em_wavenumber(*em, omega, stack.loss()).real());
    if (const auto* el = std::get_if<ElasticMaterial>(&m)) {
      const ElasticWavenumbers k = elastic_wavenumbers(*el, omega, stack.loss());
      breaks.push_back(k.kc.real());
      if (k.ks) breaks.push_back(k.ks->real());
    }
  }
  const double k_max = spec.k_max > 0 ? spec.k_max : spec.truncation_factor * kmax_material;
  const detail::QuadratureResult r =
      detail::integrate_radial(integrand, kChannels, breaks, k_max, kmax_material, spec);
  return detail::assemble_spatial(r.value, phi);
}

}  // namespace lmgf
