#pragma once

// Randomized layered media shared by the unit tests and the acceptance run.

#include <random>
#include <vector>

#include "lmgf/elastic.hpp"
#include "lmgf/stack.hpp"

namespace lmgf::testing {

struct Scenario {
  LayerStack stack;
  double z_src = 0;
  SourceKind kind = SourceKind::Tensor;
  std::vector<double> targets;  // one or more depths per non-vacuum layer, clear of the source
};

namespace detail {

inline std::vector<double> depths(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> th(0.3, 1.5);
  std::vector<double> d;
  double z = 0;
  for (int i = 0; i < n; ++i) {
    d.push_back(z);
    z -= th(rng);
  }
  return d;
}

inline void place(std::mt19937_64& rng, Scenario& s, int src) {
  const auto& d = s.stack.interfaces();
  const int n = static_cast<int>(d.size());
  std::uniform_real_distribution<double> u(0.15, 0.85);
  const auto top = [&](int t) { return t == 0 ? d[0] + 1.2 : d[t - 1]; };
  const auto bot = [&](int t) { return t == n ? d[n - 1] - 1.2 : d[t]; };
  s.z_src = bot(src) + u(rng) * (top(src) - bot(src));
  for (int t = 0; t <= n; ++t) {
    if (s.stack.phase(t) == Phase::Vacuum) continue;
    const double a = top(t), b = bot(t);
    for (double f : {0.3, 0.7}) {
      const double z = b + f * (a - b);
      if (std::abs(z - s.z_src) > 0.05 * (a - b)) s.targets.push_back(z);
    }
  }
}

}  // namespace detail

// 2..6 layers with eps, mu in [0.5, 4]
inline Scenario random_em(std::mt19937_64& rng, double loss = 1e-3) {
  std::uniform_real_distribution<double> mat(0.5, 4.0);
  const int n = 1 + static_cast<int>(rng() % 5);
  std::vector<Material> m;
  for (int i = 0; i <= n; ++i) m.push_back(EmMaterial{mat(rng), mat(rng)});
  Scenario s{LayerStack(detail::depths(rng, n), m, loss)};
  detail::place(rng, s, static_cast<int>(rng() % (n + 1)));
  return s;
}

// 2..6 layers mixing solids and fluids, sometimes capped by vacuum
inline Scenario random_elastic(std::mt19937_64& rng, SourceKind kind, double loss = 1e-3) {
  std::uniform_real_distribution<double> mat(0.5, 4.0), coin(0.0, 1.0);
  const int n = 1 + static_cast<int>(rng() % 5);
  std::vector<Material> m;
  std::vector<int> candidates;
  for (int i = 0; i <= n; ++i) {
    const bool edge = i == 0 || i == n;
    if (edge && n >= 2 && coin(rng) < 0.25) {
      m.push_back(Vacuum{});
      continue;
    }
    const bool solid = coin(rng) < 0.6;
    m.push_back(ElasticMaterial{mat(rng), mat(rng), solid ? mat(rng) : 0.0});
    if (solid == (kind == SourceKind::Tensor)) candidates.push_back(i);
  }
  if (candidates.empty()) {
    const int i = 1 + static_cast<int>(rng() % (n - 1 > 0 ? n - 1 : 1));
    const int t = std::min(i, n);
    const int pick = std::holds_alternative<Vacuum>(m[t]) ? (t == 0 ? 1 : t - 1) : t;
    m[pick] = ElasticMaterial{mat(rng), mat(rng), kind == SourceKind::Tensor ? mat(rng) : 0.0};
    candidates.push_back(pick);
  }
  Scenario s{LayerStack(detail::depths(rng, n), m, loss)};
  s.kind = kind;
  detail::place(rng, s, candidates[rng() % candidates.size()]);
  return s;
}

}  // namespace lmgf::testing
