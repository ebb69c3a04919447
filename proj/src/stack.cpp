#include "lmgf/stack.hpp"

#include <algorithm>
#include <cmath>

#include "lmgf/errors.hpp"

namespace lmgf {

Phase phase_of(const Material& m) {
  if (std::holds_alternative<Vacuum>(m)) return Phase::Vacuum;
  if (const auto* e = std::get_if<ElasticMaterial>(&m)) return e->phase();
  return Phase::Solid;
}

static void check_material(const Material& m) {
  if (const auto* em = std::get_if<EmMaterial>(&m)) {
    if (em->eps == 0 || em->mu == 0 || !std::isfinite(em->eps) || !std::isfinite(em->mu))
      throw Error(ErrorKind::InvalidMaterial, "EM material needs finite nonzero eps and mu");
  } else if (const auto* el = std::get_if<ElasticMaterial>(&m)) {
    if (!(el->rho > 0) || !(el->lambda > 0) || !(el->mu >= 0) || !std::isfinite(el->rho) ||
        !std::isfinite(el->lambda) || !std::isfinite(el->mu))
      throw Error(ErrorKind::InvalidMaterial, "elastic material needs rho > 0, lambda > 0, mu >= 0");
  }
}

cplx em_wavenumber(const EmMaterial& m, double omega, double loss) {
  check_material(m);
  return omega * std::sqrt(cplx(m.eps * m.mu)) * cplx(1.0, loss);
}

ElasticWavenumbers elastic_wavenumbers(const ElasticMaterial& m, double omega, double loss) {
  check_material(m);
  ElasticWavenumbers k;
  const cplx f(1.0, loss);
  k.kc = omega * std::sqrt(m.rho / m.gamma()) * f;
  if (m.mu > 0) k.ks = omega * std::sqrt(m.rho / m.mu) * f;
  return k;
}

std::variant<cplx, ElasticWavenumbers> wavenumbers(const Material& m, double omega, double loss) {
  if (const auto* em = std::get_if<EmMaterial>(&m)) return em_wavenumber(*em, omega, loss);
  if (const auto* el = std::get_if<ElasticMaterial>(&m)) return elastic_wavenumbers(*el, omega, loss);
  throw Error(ErrorKind::VacuumHasNoWavenumber, "vacuum layers carry no wavenumber");
}

cplx vertical_wavenumber(cplx k, double k_rho) {
  const cplx w = k * k - k_rho * k_rho;
  cplx kz = std::sqrt(w);
  if (kz.real() < 0) kz = -kz;
  if (kz.real() == 0 && kz.imag() < 0) kz = cplx(0.0, -kz.imag());
  return kz;
}

LayerStack::LayerStack(std::vector<double> interfaces, std::vector<Material> materials, double loss)
    : interfaces_(std::move(interfaces)), materials_(std::move(materials)), loss_(loss) {
  if (materials_.empty()) throw Error(ErrorKind::InvalidStack, "stack needs at least one layer");
  if (materials_.size() != interfaces_.size() + 1)
    throw Error(ErrorKind::InvalidStack, "need exactly one more material than interfaces");
  for (double d : interfaces_)
    if (!std::isfinite(d)) throw Error(ErrorKind::InvalidStack, "interface depths must be finite");
  for (size_t l = 1; l < interfaces_.size(); ++l)
    if (!(interfaces_[l] < interfaces_[l - 1]))
      throw Error(ErrorKind::InvalidStack, "interface depths must be strictly decreasing");
  if (!(loss_ >= 0) || !std::isfinite(loss_)) throw Error(ErrorKind::InvalidStack, "loss must be >= 0");

  const bool em = std::holds_alternative<EmMaterial>(materials_.front());
  kind_ = em ? ProblemKind::Maxwell : ProblemKind::Elastic;
  const int n = num_layers();
  for (int t = 0; t < n; ++t) {
    const Material& m = materials_[t];
    check_material(m);
    if (em != std::holds_alternative<EmMaterial>(m))
      throw Error(ErrorKind::InvalidStack, "all layers must share one problem kind");
    if (std::holds_alternative<Vacuum>(m)) {
      if (t != 0 && t != n - 1) throw Error(ErrorKind::InvalidStack, "vacuum allowed only as top or bottom layer");
      if (n == 1) throw Error(ErrorKind::InvalidStack, "a stack cannot be all vacuum");
    }
  }
  if (n == 2 && phase(0) == Phase::Vacuum && phase(1) == Phase::Vacuum)
    throw Error(ErrorKind::InvalidStack, "a stack cannot be all vacuum");
}

double LayerStack::geometry_scale() const {
  double s = 1.0;
  for (double d : interfaces_) s = std::max(s, std::abs(d));
  if (interfaces_.size() > 1) s = std::max(s, interfaces_.front() - interfaces_.back());
  return s;
}

int LayerStack::locate(double z) const {
  const double tol = eps_iface();
  for (size_t l = 0; l < interfaces_.size(); ++l)
    if (std::abs(z - interfaces_[l]) <= tol) throw Error(ErrorKind::OnInterface, "point lies on an interface");
  int t = 0;
  while (t < num_interfaces() && z < interfaces_[t]) ++t;
  return t;
}

double LayerStack::up_reference(int t) const {
  if (interfaces_.empty()) return 0.0;
  return interfaces_[std::min(t, num_interfaces() - 1)];
}

double LayerStack::down_reference(int t) const {
  if (interfaces_.empty()) return 0.0;
  return interfaces_[std::max(t - 1, 0)];
}

double LayerStack::max_wavenumber(double omega) const {
  double m = 0;
  for (const Material& mat : materials_) {
    if (const auto* em = std::get_if<EmMaterial>(&mat)) {
      m = std::max(m, std::abs(em_wavenumber(*em, omega, loss_)));
    } else if (const auto* el = std::get_if<ElasticMaterial>(&mat)) {
      const ElasticWavenumbers k = elastic_wavenumbers(*el, omega, loss_);
      m = std::max(m, std::abs(k.kc));
      if (k.ks) m = std::max(m, std::abs(*k.ks));
    }
  }
  return m;
}

EmLayer em_layer(const LayerStack& stack, int t, double omega) {
  const auto* m = std::get_if<EmMaterial>(&stack.material(t));
  if (!m) throw Error(ErrorKind::InvalidStack, "layer is not an EM material");
  const cplx f = stack.loss_factor();
  EmLayer out;
  out.eps = m->eps * f * f;
  out.mu = m->mu;
  out.k = em_wavenumber(*m, omega, stack.loss());
  return out;
}

ElasticLayer elastic_layer(const LayerStack& stack, int t, double omega) {
  ElasticLayer out;
  const Material& mat = stack.material(t);
  if (std::holds_alternative<Vacuum>(mat)) return out;
  const auto* m = std::get_if<ElasticMaterial>(&mat);
  if (!m) throw Error(ErrorKind::InvalidStack, "layer is not an elastic material");
  const cplx f = stack.loss_factor();
  const ElasticWavenumbers k = elastic_wavenumbers(*m, omega, stack.loss());
  out.phase = m->phase();
  out.rho = m->rho * f * f;
  out.lambda = m->lambda;
  out.mu = m->mu;
  out.kc = k.kc;
  if (k.ks) out.ks = *k.ks;
  return out;
}

}  // namespace lmgf
