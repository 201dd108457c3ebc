#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rrf/random.hpp"

namespace rrf {

using StateId = std::size_t;

/// A scattering class: its weight and the states in increasing order.
struct ScatterClass {
  double kappa = 1.0;
  std::vector<StateId> order;
};

/// Finite delineated scattering testbed: states 0..n-1, a fixed-point-free
/// involution, and a partition into totally ordered classes.
///
/// Transitions out of a state travel along its own class and land on the
/// twin of the state where scattering occurs. A state paired with a state of
/// its own class would reverse the direction of travel, so such pairs are
/// rejected.
class ScatterInstance {
 public:
  ScatterInstance(std::vector<StateId> twin, std::vector<ScatterClass> classes);

  std::size_t state_count() const { return twin_.size(); }
  std::size_t class_count() const { return classes_.size(); }
  StateId twin(StateId a) const { return twin_.at(a); }
  std::size_t class_of(StateId a) const { return class_of_.at(a); }
  std::size_t position(StateId a) const { return position_.at(a); }
  const ScatterClass& scatter_class(std::size_t k) const { return classes_.at(k); }
  const std::vector<ScatterClass>& classes() const { return classes_; }
  double kappa_of(StateId a) const { return classes_[class_of(a)].kappa; }

  /// Minimal or maximal element of its class order.
  bool is_boundary(StateId a) const;

 private:
  std::vector<StateId> twin_;
  std::vector<ScatterClass> classes_;
  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> position_;
};

/// Pads every class with a new minimal and maximal state. Each padding state
/// is paired with a cap state forming a singleton class of the same kappa,
/// so that zero-deficit scattering probabilities equal 1 on both sides of the
/// pair and the padding closes the class order.
ScatterInstance with_boundary_caps(const ScatterInstance& core);

/// Scattering probabilities, balanced transmission, and invariant measure.
struct ScatterRepresentation {
  ScatterInstance instance;
  std::vector<double> s;
  std::vector<double> omega_plus;
  std::vector<double> omega_minus;
  std::vector<double> pi;       // unnormalized
  std::vector<double> deficit;

  /// omega_{a, twin(b)} for b in the class of a: the chance of getting at
  /// least as far as b. The product runs in class order so the value is
  /// bitwise symmetric in (a, b). Zero for b outside the class or b == a.
  double transmission(StateId a, StateId b) const;
};

/// Zero-deficit (Metropolis-Hastings) construction:
/// s_{twin(a)} = min{1, kappa(class twin(a)) / kappa(class a)},
/// pi_a = min of the two kappas, omega_plus = omega_minus = 1/2.
///
/// Class extremes must pair with an equal-kappa class (see
/// with_boundary_caps); otherwise the escape at the class ends would break
/// detailed balance.
ScatterRepresentation build_mh(const ScatterInstance& instance);

struct TransitionMatrix {
  std::size_t n = 0;
  std::vector<double> p;       // row-major n x n
  std::vector<double> escape;  // probability of running off a class end

  double operator()(StateId a, StateId b) const { return p[a * n + b]; }
  double row_sum(StateId a) const;
};

TransitionMatrix transition_matrix(const ScatterRepresentation& rep);

/// max |pi_a p(a, b~) - pi_b p(b, a~)| over all ordered state pairs, also
/// covering |pi_a - pi_{a~}|.
double check_detailed_balance(const ScatterRepresentation& rep,
                              const TransitionMatrix& matrix);
double check_detailed_balance(const ScatterRepresentation& rep);

enum class InflowSide { Left, Right, All };

/// Left/Right: 2 * sum over c on that side of pi_c omega_{c, a~}.
/// All: sum over c != a of pi_c omega_{c, a~}. Each equals kappa(class a).
/// Throws BoundaryState for class extremes.
double kappa_inflow(const ScatterRepresentation& rep, StateId a, InflowSide side);

/// One transition: fair coin for the direction, then each successive state z
/// of the class is accepted with probability s_{z~}. nullopt means the walk
/// ran off the end of the class (escape).
std::optional<StateId> simulate_step(const ScatterRepresentation& rep, StateId a,
                                     Rng& rng);

}  // namespace rrf
