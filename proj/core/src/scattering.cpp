#include "rrf/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rrf/errors.hpp"

namespace rrf {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

// Product of (1 - s_{z~}) over class positions strictly between i and j.
double survival_between(const ScatterRepresentation& rep, std::size_t cls,
                        std::size_t i, std::size_t j) {
  const auto& order = rep.instance.scatter_class(cls).order;
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  double prod = 1.0;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    prod *= 1.0 - rep.s[rep.instance.twin(order[k])];
  }
  return prod;
}

}  // namespace

ScatterInstance::ScatterInstance(std::vector<StateId> twin,
                                 std::vector<ScatterClass> classes)
    : twin_(std::move(twin)), classes_(std::move(classes)) {
  const std::size_t n = twin_.size();
  for (StateId a = 0; a < n; ++a) {
    if (twin_[a] >= n) throw InvalidInstance("twin of state " + std::to_string(a) + " out of range");
    if (twin_[a] == a) throw InvalidInstance("involution fixes state " + std::to_string(a));
    if (twin_[twin_[a]] != a) throw InvalidInstance("pairing is not an involution at state " + std::to_string(a));
  }
  class_of_.assign(n, kUnassigned);
  position_.assign(n, kUnassigned);
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    const auto& cls = classes_[k];
    if (!(cls.kappa > 0.0) || !std::isfinite(cls.kappa)) {
      throw InvalidInstance("class " + std::to_string(k) + " has non-positive kappa");
    }
    if (cls.order.empty()) throw InvalidInstance("class " + std::to_string(k) + " is empty");
    for (std::size_t i = 0; i < cls.order.size(); ++i) {
      const StateId a = cls.order[i];
      if (a >= n) throw InvalidInstance("class member out of range");
      if (class_of_[a] != kUnassigned) {
        throw InvalidInstance("state " + std::to_string(a) + " belongs to two classes");
      }
      class_of_[a] = k;
      position_[a] = i;
    }
  }
  for (StateId a = 0; a < n; ++a) {
    if (class_of_[a] == kUnassigned) {
      throw InvalidInstance("state " + std::to_string(a) + " has no class");
    }
  }
  for (StateId a = 0; a < n; ++a) {
    if (class_of_[a] == class_of_[twin_[a]]) {
      throw InvalidInstance("state " + std::to_string(a) +
                            " shares a class with its twin (reverse scatterer)");
    }
  }
}

bool ScatterInstance::is_boundary(StateId a) const {
  const auto& order = classes_[class_of(a)].order;
  const std::size_t pos = position(a);
  return pos == 0 || pos + 1 == order.size();
}

ScatterInstance with_boundary_caps(const ScatterInstance& core) {
  std::vector<StateId> twin(core.state_count());
  for (StateId a = 0; a < twin.size(); ++a) twin[a] = core.twin(a);
  std::vector<ScatterClass> classes = core.classes();
  const std::size_t original = classes.size();
  auto add_pair = [&](double kappa) {
    const StateId pad = twin.size();
    const StateId cap = pad + 1;
    twin.push_back(cap);
    twin.push_back(pad);
    classes.push_back({kappa, {cap}});
    return pad;
  };
  for (std::size_t k = 0; k < original; ++k) {
    const double kappa = classes[k].kappa;
    const StateId low = add_pair(kappa);
    const StateId high = add_pair(kappa);
    auto& order = classes[k].order;
    order.insert(order.begin(), low);
    order.push_back(high);
  }
  return ScatterInstance(std::move(twin), std::move(classes));
}

double ScatterRepresentation::transmission(StateId a, StateId b) const {
  const std::size_t cls = instance.class_of(a);
  if (a == b || instance.class_of(b) != cls) return 0.0;
  const std::size_t pa = instance.position(a), pb = instance.position(b);
  const double direction = pb > pa ? omega_plus[a] : omega_minus[a];
  return direction * survival_between(*this, cls, pa, pb);
}

ScatterRepresentation build_mh(const ScatterInstance& instance) {
  const std::size_t n = instance.state_count();
  ScatterRepresentation rep{instance, {}, {}, {}, {}, {}};
  rep.s.resize(n);
  rep.pi.resize(n);
  rep.deficit.resize(n);
  rep.omega_plus.assign(n, 0.5);
  rep.omega_minus.assign(n, 0.5);
  for (StateId a = 0; a < n; ++a) {
    const double k_own = instance.kappa_of(a);
    const double k_twin = instance.kappa_of(instance.twin(a));
    rep.s[a] = std::min(1.0, k_own / k_twin);
    rep.pi[a] = std::min(k_own, k_twin);
    rep.deficit[a] = 1.0 - rep.pi[a] / std::min(k_own, k_twin);
  }
  for (StateId a = 0; a < n; ++a) {
    if (!instance.is_boundary(a)) continue;
    if (instance.kappa_of(a) != instance.kappa_of(instance.twin(a))) {
      throw InvalidInstance("class extreme " + std::to_string(a) +
                            " must pair with an equal-kappa class");
    }
  }
  return rep;
}

double TransitionMatrix::row_sum(StateId a) const {
  double sum = 0.0;
  for (std::size_t b = 0; b < n; ++b) sum += p[a * n + b];
  return sum;
}

TransitionMatrix transition_matrix(const ScatterRepresentation& rep) {
  const auto& inst = rep.instance;
  const std::size_t n = inst.state_count();
  TransitionMatrix m{n, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0)};
  for (StateId a = 0; a < n; ++a) {
    const std::size_t cls = inst.class_of(a);
    const auto& order = inst.scatter_class(cls).order;
    const std::size_t pa = inst.position(a);
    for (std::size_t pb = 0; pb < order.size(); ++pb) {
      if (pb == pa) continue;
      const StateId b = order[pb];
      const StateId target = inst.twin(b);
      m.p[a * n + target] = rep.transmission(a, b) * rep.s[target];
    }
    const std::size_t last = order.size() - 1;
    const double up = pa == last ? 1.0 : survival_between(rep, cls, pa, last + 1);
    const double down =
        pa == 0 ? 1.0 : survival_between(rep, cls, std::size_t{0}, pa) *
                            (1.0 - rep.s[inst.twin(order[0])]);
    m.escape[a] = rep.omega_plus[a] * up + rep.omega_minus[a] * down;
  }
  return m;
}

double check_detailed_balance(const ScatterRepresentation& rep,
                              const TransitionMatrix& matrix) {
  const auto& inst = rep.instance;
  const std::size_t n = inst.state_count();
  double worst = 0.0;
  for (StateId a = 0; a < n; ++a) {
    worst = std::max(worst, std::abs(rep.pi[a] - rep.pi[inst.twin(a)]));
    for (StateId b = 0; b < n; ++b) {
      if (a == b) continue;
      const double forward = rep.pi[a] * matrix(a, inst.twin(b));
      const double backward = rep.pi[b] * matrix(b, inst.twin(a));
      worst = std::max(worst, std::abs(forward - backward));
    }
  }
  return worst;
}

double check_detailed_balance(const ScatterRepresentation& rep) {
  return check_detailed_balance(rep, transition_matrix(rep));
}

double kappa_inflow(const ScatterRepresentation& rep, StateId a, InflowSide side) {
  const auto& inst = rep.instance;
  if (inst.is_boundary(a)) {
    throw BoundaryState("state " + std::to_string(a) + " is a class extreme");
  }
  const auto& order = inst.scatter_class(inst.class_of(a)).order;
  const std::size_t pa = inst.position(a);
  double left = 0.0, right = 0.0;
  for (std::size_t pc = 0; pc < order.size(); ++pc) {
    const StateId c = order[pc];
    const double flow = rep.pi[c] * rep.transmission(c, a);
    if (pc < pa) left += flow;
    if (pc > pa) right += flow;
  }
  switch (side) {
    case InflowSide::Left: return 2.0 * left;
    case InflowSide::Right: return 2.0 * right;
    case InflowSide::All: return left + right;
  }
  return 0.0;
}

std::optional<StateId> simulate_step(const ScatterRepresentation& rep, StateId a,
                                     Rng& rng) {
  const auto& inst = rep.instance;
  const auto& order = inst.scatter_class(inst.class_of(a)).order;
  const std::size_t pa = inst.position(a);
  const bool up = rng.uniform() < rep.omega_plus[a];
  if (up) {
    for (std::size_t k = pa + 1; k < order.size(); ++k) {
      const StateId target = inst.twin(order[k]);
      if (rng.bernoulli(rep.s[target])) return target;
    }
  } else {
    for (std::size_t k = pa; k-- > 0;) {
      const StateId target = inst.twin(order[k]);
      if (rng.bernoulli(rep.s[target])) return target;
    }
  }
  return std::nullopt;
}

}  // namespace rrf
