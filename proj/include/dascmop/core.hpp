#pragma once

// Value types, feasibility and dominance relations shared by every other
// header in the library.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dascmop {

using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;
using ConstraintVector = std::vector<double>;

/// Violated precondition (bad sizes, out-of-range arguments).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values met while evaluating a solution.
class EvaluationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A problem or solver could not be assembled from the given description.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Difficulty levels (eta, zeta, gamma) for diversity, feasibility and
/// convergence hardness. Every component lies in [0, 1].
struct DifficultyTriplet {
  double eta = 0.0;
  double zeta = 0.0;
  double gamma = 0.0;

  friend bool operator==(const DifficultyTriplet&, const DifficultyTriplet&) = default;

  [[nodiscard]] bool valid() const noexcept {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    return in_unit(eta) && in_unit(zeta) && in_unit(gamma);
  }

  void validate() const {
    if (!valid()) {
      throw ContractError("difficulty triplet components must lie in [0,1], got (" +
                          std::to_string(eta) + ", " + std::to_string(zeta) + ", " +
                          std::to_string(gamma) + ")");
    }
  }
};

/// Sum of the negative parts of the constraint values; zero iff feasible.
inline double overall_violation(std::span<const double> c) {
  double total = 0.0;
  for (double ci : c) {
    if (!std::isfinite(ci)) throw EvaluationError("non-finite constraint value");
    if (ci < 0.0) total -= ci;
  }
  return total;
}

/// Pareto dominance for minimization.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractError("dominates: objective vectors of different length (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  bool strictly_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly_better = true;
  }
  return strictly_better;
}

struct EvaluatedSolution {
  DecisionVector x;
  ObjectiveVector f;
  ConstraintVector c;
  double violation = 0.0;

  [[nodiscard]] bool feasible() const noexcept { return violation == 0.0; }
};

enum class CdpOrder { first_better, second_better, tie };

/// Constraint-dominance comparison: feasible beats infeasible, smaller
/// violation wins between infeasible solutions, Pareto dominance decides
/// between feasible ones.
inline CdpOrder cdp_compare(const EvaluatedSolution& a, const EvaluatedSolution& b) {
  const bool fa = a.feasible();
  const bool fb = b.feasible();
  if (fa && !fb) return CdpOrder::first_better;
  if (!fa && fb) return CdpOrder::second_better;
  if (!fa) {
    if (a.violation < b.violation) return CdpOrder::first_better;
    if (b.violation < a.violation) return CdpOrder::second_better;
    return CdpOrder::tie;
  }
  if (dominates(a.f, b.f)) return CdpOrder::first_better;
  if (dominates(b.f, a.f)) return CdpOrder::second_better;
  return CdpOrder::tie;
}

/// True when `a` constraint-dominates `b`.
inline bool cdp_dominates(const EvaluatedSolution& a, const EvaluatedSolution& b) {
  return cdp_compare(a, b) == CdpOrder::first_better;
}

}  // namespace dascmop
