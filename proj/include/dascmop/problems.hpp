#pragma once

// The nine named instances DAS-CMOP1..9 built on the construction toolkit.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dascmop/core.hpp"
#include "dascmop/toolkit.hpp"

namespace dascmop {

inline constexpr int kNumNamedProblems = 9;
inline constexpr std::size_t kNamedVariables = 30;

namespace detail {

constexpr double kPi = std::numbers::pi;

// Shape functions over x_{1:m-1}.
inline void shape_convex(std::span<const double> s, std::span<double> a) {
  a[0] = s[0];
  a[1] = 1.0 - s[0] * s[0];
}
inline void shape_concave(std::span<const double> s, std::span<double> a) {
  a[0] = s[0];
  a[1] = 1.0 - std::sqrt(s[0]);
}
inline void shape_discontinuous(std::span<const double> s, std::span<double> a) {
  a[0] = s[0];
  a[1] = 1.0 - std::sqrt(s[0]) + 0.5 * std::abs(std::sin(5.0 * kPi * s[0]));
}
inline void shape_linear3(std::span<const double> s, std::span<double> a) {
  a[0] = s[0] * s[1];
  a[1] = s[1] * (1.0 - s[0]);
  a[2] = 1.0 - s[1];
}
inline void shape_sphere3(std::span<const double> s, std::span<double> a) {
  const double c1 = std::cos(0.5 * kPi * s[0]);
  a[0] = c1 * std::cos(0.5 * kPi * s[1]);
  a[1] = c1 * std::sin(0.5 * kPi * s[1]);
  a[2] = std::sin(0.5 * kPi * s[0]);
}

// Two linked distance functions over the odd (g1) and even (g2) indices
// j in [2, n], 1-based.
inline void distance_linked_pair(std::span<const double> x, std::span<double> beta) {
  const double target1 = std::sin(0.5 * kPi * x[0]);
  const double target2 = std::cos(0.5 * kPi * x[0]);
  double g1 = 0.0;
  double g2 = 0.0;
  for (std::size_t j = 2; j <= x.size(); ++j) {
    const double xj = x[j - 1];
    if (j % 2 == 1) {
      g1 += (xj - target1) * (xj - target1);
    } else {
      g2 += (xj - target2) * (xj - target2);
    }
  }
  beta[0] = g1;
  beta[1] = g2;
}

// Rastrigin-type distance over x_j, j > first_free (1-based), shared by all
// objectives. Minimum 0 at x_j = 0.5.
inline double rastrigin_distance(std::span<const double> x, std::size_t first_free) {
  double g = static_cast<double>(x.size() - first_free);
  for (std::size_t j = first_free + 1; j <= x.size(); ++j) {
    const double t = x[j - 1] - 0.5;
    g += t * t - std::cos(20.0 * kPi * t);
  }
  return g;
}

inline void distance_rastrigin2(std::span<const double> x, std::span<double> beta) {
  const double g = rastrigin_distance(x, 1);
  beta[0] = g;
  beta[1] = g;
}

inline void distance_rastrigin3(std::span<const double> x, std::span<double> beta) {
  const double g = rastrigin_distance(x, 2);
  beta[0] = beta[1] = beta[2] = g;
}

inline void distance_linked3(std::span<const double> x, std::span<double> beta) {
  const double n = static_cast<double>(x.size());
  const double sum12 = x[0] + x[1];
  double g = 0.0;
  for (std::size_t j = 3; j <= x.size(); ++j) {
    const double t = x[j - 1] - std::cos(0.25 * static_cast<double>(j) / n * kPi * sum12);
    g += t * t;
  }
  beta[0] = beta[1] = beta[2] = g;
}

// Nine ellipses shared by the two-objective instances.
inline std::vector<ExclusionRegion> two_objective_ellipses() {
  constexpr std::array<double, 9> p{0, 1, 0, 1, 2, 0, 1, 2, 3};
  constexpr std::array<double, 9> q{1.5, 0.5, 2.5, 1.5, 0.5, 3.5, 2.5, 1.5, 0.5};
  std::vector<ExclusionRegion> regions;
  regions.reserve(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    regions.emplace_back(EllipseParams{p[k], q[k], 0.3, 1.2, -0.25 * kPi});
  }
  return regions;
}

inline std::vector<ExclusionRegion> three_objective_spheres() {
  std::vector<ExclusionRegion> regions;
  for (auto& s : unit_and_centroid_spheres()) regions.emplace_back(std::move(s));
  return regions;
}

}  // namespace detail

inline std::string problem_name(int id) { return "das-cmop" + std::to_string(id); }

/// Parses "das-cmop<k>" (case-insensitive prefix) or a bare "<k>".
inline int parse_problem_name(std::string_view text) {
  std::string lowered(text);
  for (auto& ch : lowered) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  std::string_view digits = lowered;
  constexpr std::string_view prefix = "das-cmop";
  if (digits.starts_with(prefix)) digits.remove_prefix(prefix.size());
  int id = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || id < 1 || id > kNumNamedProblems) {
    throw ContractError("unknown problem '" + std::string(text) + "' (expected das-cmop1 .. das-cmop9)");
  }
  return id;
}

/// Generator description of DAS-CMOP<id>. `n` defaults to the named 30.
inline GeneratorSpec das_cmop_spec(int id, std::size_t n = kNamedVariables) {
  if (id < 1 || id > kNumNamedProblems) throw ContractError("problem id must be in 1..9");
  GeneratorSpec spec;
  spec.name = problem_name(id);
  spec.id = id;
  spec.n = n;
  spec.a = 20.0;
  spec.d = 0.5;
  if (id <= 6) {
    spec.m = 2;
    spec.K = 1;
    spec.P = id <= 3 ? 2 : 1;
    spec.regions = detail::two_objective_ellipses();
    switch ((id - 1) % 3) {
      case 0: spec.shape = detail::shape_convex; break;
      case 1: spec.shape = detail::shape_concave; break;
      default: spec.shape = detail::shape_discontinuous; break;
    }
    if (id <= 3) {
      spec.distance = detail::distance_linked_pair;
    } else {
      spec.distance = detail::distance_rastrigin2;
    }
  } else {
    spec.m = 3;
    spec.K = 2;
    spec.P = 1;
    spec.regions = detail::three_objective_spheres();
    spec.shape = id == 7 ? detail::shape_linear3 : detail::shape_sphere3;
    spec.distance = id == 9 ? detail::distance_linked3 : detail::distance_rastrigin3;
  }
  return spec;
}

inline ProblemInstance make_das_cmop(int id, const DifficultyTriplet& t, std::size_t n = kNamedVariables) {
  return assemble_problem(das_cmop_spec(id, n), t);
}

inline std::size_t constraint_count(const ProblemInstance& inst) { return inst.num_constraints(); }

/// Point of the front obtained with every distance value at zero.
inline ObjectiveVector unconstrained_pf_point(const ProblemInstance& inst, std::span<const double> s) {
  for (double v : s)
    if (!(v >= 0.0 && v <= 1.0)) throw ContractError("shape parameter outside [0,1]");
  return inst.shape_point(s);
}

/// The sixteen evaluation triplets, in result-table row order.
inline std::vector<DifficultyTriplet> builtin_triplets() {
  return {{0.0, 0.0, 0.0},   {0.0, 0.25, 0.0},  {0.0, 0.0, 0.25}, {0.25, 0.0, 0.0},
          {0.0, 0.5, 0.0},   {0.0, 0.0, 0.5},   {0.5, 0.0, 0.0},  {0.0, 0.75, 0.0},
          {0.0, 0.0, 0.75},  {0.75, 0.0, 0.0},  {0.0, 1.0, 0.0},  {0.0, 0.0, 1.0},
          {1.0, 0.0, 0.0},   {0.25, 0.25, 0.25}, {0.5, 0.5, 0.5}, {0.75, 0.75, 0.75}};
}

}  // namespace dascmop
