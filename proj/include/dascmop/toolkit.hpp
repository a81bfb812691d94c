#pragma once

// Construction toolkit: the three parameterized constraint families, the
// mapping from a difficulty triplet to family parameters, and the assembler
// that combines shape/distance objectives with the constraint families into
// an evaluable problem instance.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dascmop/core.hpp"

namespace dascmop {

/// Constraint-family parameters derived from a triplet.
///
/// b = 2*eta - 1, e = d - ln(zeta), r = gamma / 2. A family whose difficulty
/// level is exactly zero is switched off and its slots evaluate to +1.
struct TripletParams {
  double b = -1.0;
  double d = 0.0;
  double e = std::numeric_limits<double>::infinity();
  double r = 0.0;
  bool type1_active = false;
  bool type2_active = false;
  bool type3_active = false;
};

inline TripletParams triplet_to_params(const DifficultyTriplet& t, double d) {
  t.validate();
  if (!(d >= 0.0) || !std::isfinite(d)) throw ContractError("triplet_to_params: d must be finite and >= 0");
  TripletParams p;
  p.b = 2.0 * t.eta - 1.0;
  p.d = d;
  p.r = t.gamma / 2.0;
  p.type1_active = t.eta > 0.0;
  p.type2_active = t.zeta > 0.0;
  p.type3_active = t.gamma > 0.0;
  p.e = p.type2_active ? d - std::log(t.zeta) : std::numeric_limits<double>::infinity();
  return p;
}

/// Segmenting constraint on shape variable x_k (k is 1-based):
/// sin(a*pi*x_k) - b for odd k, cos(a*pi*x_k) - b for even k.
inline double type1_constraint(double x_k, std::size_t k, double a, double b) {
  const double arg = a * std::numbers::pi * x_k;
  return (k % 2 == 1 ? std::sin(arg) : std::cos(arg)) - b;
}

/// Band constraint on a distance value: nonnegative iff beta lies in [d, e].
inline double type2_constraint(double beta, double d, double e) { return (e - beta) * (beta - d); }

/// Rotated ellipse in a two-objective space, centred at (p, q) with squared
/// half-axes a2, b2 and rotation theta.
struct EllipseParams {
  double p = 0.0;
  double q = 0.0;
  double a2 = 1.0;
  double b2 = 1.0;
  double theta = 0.0;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// The (non-symmetric) transformation matrix of the quadratic form. Its
/// off-diagonal entries are -sin(2t)/a2 and sin(2t)/b2; only their sum enters
/// the quadratic form.
inline Matrix2 ellipse_transform(const EllipseParams& ep) {
  const double c = std::cos(ep.theta);
  const double s = std::sin(ep.theta);
  const double s2t = std::sin(2.0 * ep.theta);
  return {{{c * c / ep.a2 + s * s / ep.b2, -s2t / ep.a2},
           {s2t / ep.b2, c * c / ep.b2 + s * s / ep.a2}}};
}

/// Expanded form of the ellipse exclusion constraint.
inline double type3_ellipse_constraint(std::span<const double> f, const EllipseParams& ep, double r) {
  if (f.size() != 2) throw ContractError("ellipse constraint needs a two-objective vector");
  const double dx = f[0] - ep.p;
  const double dy = f[1] - ep.q;
  const double c = std::cos(ep.theta);
  const double s = std::sin(ep.theta);
  const double u = dx * c - dy * s;
  const double v = dx * s + dy * c;
  return u * u / ep.a2 + v * v / ep.b2 - r;
}

/// Matrix form (F - H)^T S (F - H) - r of the same constraint.
inline double type3_ellipse_constraint_matrix(std::span<const double> f, const EllipseParams& ep,
                                              double r) {
  if (f.size() != 2) throw ContractError("ellipse constraint needs a two-objective vector");
  const Matrix2 S = ellipse_transform(ep);
  const std::array<double, 2> h{f[0] - ep.p, f[1] - ep.q};
  double quad = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) quad += h[i] * S[i][j] * h[j];
  return quad - r;
}

/// Spherical exclusion region: |f - center|^2 - r^2 >= 0.
struct SphereRegion {
  ObjectiveVector center;
};

inline double type3_sphere_constraint(std::span<const double> f, const SphereRegion& sp, double r) {
  if (f.size() != sp.center.size()) throw ContractError("sphere constraint: dimension mismatch");
  double sq = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double diff = f[j] - sp.center[j];
    sq += diff * diff;
  }
  return sq - r * r;
}

/// The four three-objective exclusion spheres: one at each unit vector and
/// one at the centroid (1/sqrt 3, 1/sqrt 3, 1/sqrt 3).
inline std::vector<SphereRegion> unit_and_centroid_spheres() {
  const double c = 1.0 / std::sqrt(3.0);
  return {{{1.0, 0.0, 0.0}}, {{0.0, 1.0, 0.0}}, {{0.0, 0.0, 1.0}}, {{c, c, c}}};
}

inline std::array<double, 4> type3_sphere_constraints(std::span<const double> f, double r) {
  if (f.size() != 3) throw ContractError("sphere constraints need a three-objective vector");
  const auto spheres = unit_and_centroid_spheres();
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) out[k] = type3_sphere_constraint(f, spheres[k], r);
  return out;
}

using ExclusionRegion = std::variant<EllipseParams, SphereRegion>;

/// Description of a constrained problem before a triplet is applied.
///
/// `shape` maps the first m-1 variables to the m shape values; `distance`
/// maps the whole decision vector to m nonnegative distance values. The
/// first P distance values are bounded by the band constraints and one
/// exclusion constraint is generated per region.
struct GeneratorSpec {
  std::string name;
  int id = 0;
  std::size_t m = 2;
  std::size_t n = 30;
  std::size_t K = 1;
  std::size_t P = 1;
  double a = 20.0;
  double d = 0.5;
  std::function<void(std::span<const double>, std::span<double>)> shape;
  std::function<void(std::span<const double>, std::span<double>)> distance;
  std::vector<ExclusionRegion> regions;

  [[nodiscard]] std::size_t Q() const noexcept { return regions.size(); }

  void validate() const {
    if (m < 2) throw ConstructionError(name + ": need at least two objectives");
    if (n < m) throw ConstructionError(name + ": need n >= m");
    if (K > m - 1) throw ConstructionError(name + ": Type-I count K must be <= m-1");
    if (P > m) throw ConstructionError(name + ": Type-II count P must be <= m");
    if (regions.empty()) throw ConstructionError(name + ": Type-III count Q must be >= 1");
    if (!(a > 0.0)) throw ConstructionError(name + ": segment frequency a must be positive");
    if (!(d >= 0.0)) throw ConstructionError(name + ": offset d must be nonnegative");
    if (!shape || !distance) throw ConstructionError(name + ": shape and distance functions required");
    for (const auto& region : regions) {
      if (const auto* ep = std::get_if<EllipseParams>(&region)) {
        if (m != 2) throw ConstructionError(name + ": ellipse regions need m = 2");
        if (!(ep->a2 > 0.0) || !(ep->b2 > 0.0))
          throw ConstructionError(name + ": ellipse half-axis squares must be positive");
      } else if (std::get<SphereRegion>(region).center.size() != m) {
        throw ConstructionError(name + ": sphere centre dimension must equal m");
      }
    }
  }
};

/// A fully resolved problem: objectives f_i = shape_i + distance_i and the
/// constraint vector laid out as Type-I (K), Type-II (P), Type-III (Q).
/// Immutable after construction.
class ProblemInstance {
 public:
  struct Evaluation {
    ObjectiveVector f;
    ConstraintVector c;
  };

  ProblemInstance(GeneratorSpec spec, const DifficultyTriplet& triplet)
      : spec_(std::move(spec)), triplet_(triplet) {
    spec_.validate();
    params_ = triplet_to_params(triplet_, spec_.d);
  }

  [[nodiscard]] const std::string& name() const noexcept { return spec_.name; }
  [[nodiscard]] int id() const noexcept { return spec_.id; }
  [[nodiscard]] std::size_t num_objectives() const noexcept { return spec_.m; }
  [[nodiscard]] std::size_t num_variables() const noexcept { return spec_.n; }
  [[nodiscard]] std::size_t num_constraints() const noexcept { return spec_.K + spec_.P + spec_.Q(); }
  [[nodiscard]] std::size_t num_shape_variables() const noexcept { return spec_.m - 1; }
  [[nodiscard]] const DifficultyTriplet& triplet() const noexcept { return triplet_; }
  [[nodiscard]] const TripletParams& params() const noexcept { return params_; }
  [[nodiscard]] const GeneratorSpec& spec() const noexcept { return spec_; }

  /// Shape values at the given shape variables (the front with zero distance).
  [[nodiscard]] ObjectiveVector shape_point(std::span<const double> s) const {
    if (s.size() != num_shape_variables()) throw ContractError(name() + ": wrong shape-parameter length");
    ObjectiveVector alpha(spec_.m);
    spec_.shape(s, alpha);
    return alpha;
  }

  /// Type-I values for the shape variables, written to out[0..K).
  void segment_constraints(std::span<const double> shape_vars, std::span<double> out) const {
    for (std::size_t k = 0; k < spec_.K; ++k) {
      out[k] = params_.type1_active ? type1_constraint(shape_vars[k], k + 1, spec_.a, params_.b) : 1.0;
    }
  }

  [[nodiscard]] double band_constraint(double beta) const {
    return params_.type2_active ? type2_constraint(beta, params_.d, params_.e) : 1.0;
  }

  /// Type-III values at objective vector f, written to out[0..Q).
  void region_constraints(std::span<const double> f, std::span<double> out) const {
    for (std::size_t q = 0; q < spec_.regions.size(); ++q) {
      if (!params_.type3_active) {
        out[q] = 1.0;
        continue;
      }
      const auto& region = spec_.regions[q];
      if (const auto* ep = std::get_if<EllipseParams>(&region)) {
        out[q] = type3_ellipse_constraint(f, *ep, params_.r);
      } else {
        out[q] = type3_sphere_constraint(f, std::get<SphereRegion>(region), params_.r);
      }
    }
  }

  /// Evaluates into caller-provided buffers of length m and num_constraints().
  void evaluate_into(std::span<const double> x, std::span<double> f, std::span<double> c) const {
    check_decision(x);
    if (f.size() != spec_.m || c.size() != num_constraints())
      throw ContractError(name() + ": output buffers have the wrong size");
    const auto shape_vars = x.first(spec_.m - 1);
    std::array<double, 16> scratch{};
    std::vector<double> heap;
    std::span<double> beta;
    if (spec_.m <= scratch.size()) {
      beta = std::span<double>(scratch).first(spec_.m);
    } else {
      heap.assign(spec_.m, 0.0);
      beta = heap;
    }
    spec_.shape(shape_vars, f);
    spec_.distance(x, beta);
    for (std::size_t i = 0; i < spec_.m; ++i) f[i] += beta[i];

    segment_constraints(shape_vars, c.first(spec_.K));
    for (std::size_t p = 0; p < spec_.P; ++p) c[spec_.K + p] = band_constraint(beta[p]);
    region_constraints(f, c.subspan(spec_.K + spec_.P));

    for (double v : f)
      if (!std::isfinite(v)) throw EvaluationError(name() + ": non-finite objective value");
  }

  [[nodiscard]] Evaluation evaluate(std::span<const double> x) const {
    Evaluation ev{ObjectiveVector(spec_.m), ConstraintVector(num_constraints())};
    evaluate_into(x, ev.f, ev.c);
    return ev;
  }

  [[nodiscard]] EvaluatedSolution evaluate_solution(DecisionVector x) const {
    EvaluatedSolution sol;
    sol.f.resize(spec_.m);
    sol.c.resize(num_constraints());
    evaluate_into(x, sol.f, sol.c);
    sol.violation = overall_violation(sol.c);
    sol.x = std::move(x);
    return sol;
  }

 private:
  void check_decision(std::span<const double> x) const {
    if (x.size() != spec_.n) {
      throw ContractError(name() + ": expected " + std::to_string(spec_.n) + " variables, got " +
                          std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
        throw ContractError(name() + ": variable x" + std::to_string(i + 1) + " = " + std::to_string(x[i]) +
                            " outside [0,1]");
      }
    }
  }

  GeneratorSpec spec_;
  DifficultyTriplet triplet_;
  TripletParams params_;
};

inline ProblemInstance assemble_problem(GeneratorSpec spec, const DifficultyTriplet& t) {
  return ProblemInstance(std::move(spec), t);
}

}  // namespace dascmop
