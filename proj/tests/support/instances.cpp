#include "instances.hpp"

#include <algorithm>
#include <cmath>

namespace rrf::testing {

ScatterInstance random_core_instance(Rng& rng, const InstanceShape& shape) {
  for (;;) {
    const std::size_t classes = 2 + rng.index(shape.max_classes - 1);
    const std::size_t pairs_lo = (classes + 1) / 2;
    const std::size_t pairs_hi = shape.max_states / 2;
    const std::size_t n = 2 * (pairs_lo + rng.index(pairs_hi - pairs_lo + 1));

    std::vector<std::size_t> cls(n);
    for (std::size_t a = 0; a < n; ++a) cls[a] = a < classes ? a : rng.index(classes);

    // Random matching across classes; retry the shuffle a few times.
    std::vector<StateId> perm(n);
    for (std::size_t a = 0; a < n; ++a) perm[a] = a;
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      std::shuffle(perm.begin(), perm.end(), rng);
      ok = true;
      for (std::size_t i = 0; i < n; i += 2) ok = ok && cls[perm[i]] != cls[perm[i + 1]];
    }
    if (!ok) continue;
    std::vector<StateId> twin(n);
    for (std::size_t i = 0; i < n; i += 2) {
      twin[perm[i]] = perm[i + 1];
      twin[perm[i + 1]] = perm[i];
    }
    std::vector<ScatterClass> out(classes);
    const double lo = std::log(shape.kappa_lo), hi = std::log(shape.kappa_hi);
    for (auto& c : out) c.kappa = std::exp(rng.uniform(lo, hi));
    for (std::size_t a = 0; a < n; ++a) out[cls[a]].order.push_back(a);
    for (auto& c : out) std::shuffle(c.order.begin(), c.order.end(), rng);
    return ScatterInstance(std::move(twin), std::move(out));
  }
}

ScatterInstance three_state_example() {
  ScatterInstance core({1, 0}, {{1.0, {0}}, {0.5, {1}}});
  return with_boundary_caps(core);
}

}  // namespace rrf::testing
