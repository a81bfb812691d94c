#pragma once

// IGD, nondominated filtering, the reference-front oracle and Monte-Carlo
// feasibility estimation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dascmop/core.hpp"
#include "dascmop/format.hpp"
#include "dascmop/problems.hpp"
#include "dascmop/random.hpp"
#include "dascmop/toolkit.hpp"

namespace dascmop {

inline constexpr std::size_t kDefaultFrontCap = 10000;

/// A sampled ideal front together with where it came from.
struct ReferenceFront {
  int problem_id = 0;
  DifficultyTriplet triplet;
  std::size_t resolution = 0;
  std::vector<ObjectiveVector> points;
};

/// The oracle found no feasible point at the requested resolution.
class EmptyFrontError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FrontFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

/// Mean over reference points of the distance to the nearest approximation
/// point, on the raw objective scale.
inline double igd(std::span<const ObjectiveVector> reference, std::span<const ObjectiveVector> approx) {
  if (reference.empty()) throw ContractError("igd: empty reference set");
  if (approx.empty()) throw ContractError("igd: empty approximation set");
  const std::size_t m = reference.front().size();
  for (const auto& p : reference)
    if (p.size() != m) throw ContractError("igd: inconsistent reference dimension");
  for (const auto& p : approx)
    if (p.size() != m) throw ContractError("igd: approximation dimension differs from reference");

  double total = 0.0;
  for (const auto& y : reference) {
    double best_sq = std::numeric_limits<double>::infinity();
    for (const auto& a : approx) {
      double sq = 0.0;
      for (std::size_t i = 0; i < m && sq < best_sq; ++i) {
        const double d = y[i] - a[i];
        sq += d * d;
      }
      best_sq = std::min(best_sq, sq);
    }
    total += std::sqrt(best_sq);
  }
  return total / static_cast<double>(reference.size());
}

/// Nondominated subset with duplicates collapsed, in lexicographic order.
inline std::vector<ObjectiveVector> nondominated_filter(std::vector<ObjectiveVector> points) {
  if (points.empty()) return points;
  const std::size_t m = points.front().size();
  for (const auto& p : points)
    if (p.size() != m) throw ContractError("nondominated_filter: inconsistent dimension");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // In lexicographic order a point can only be dominated by an earlier one.
  std::vector<ObjectiveVector> front;
  if (m == 2) {
    double best_second = std::numeric_limits<double>::infinity();
    for (auto& p : points) {
      if (p[1] < best_second) {
        best_second = p[1];
        front.push_back(std::move(p));
      }
    }
    return front;
  }
  for (auto& p : points) {
    const bool dominated =
        std::any_of(front.begin(), front.end(), [&](const ObjectiveVector& q) { return dominates(q, p); });
    if (!dominated) front.push_back(std::move(p));
  }
  return front;
}

/// Greedy farthest-point subset of at most `cap` points, seeded with the
/// first point; preserves input order.
inline std::vector<ObjectiveVector> thin_farthest_point(const std::vector<ObjectiveVector>& points,
                                                        std::size_t cap) {
  if (points.size() <= cap) return points;
  if (cap == 0) return {};
  std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
  std::vector<char> chosen(points.size(), 0);
  std::size_t current = 0;
  for (std::size_t picked = 0; picked < cap; ++picked) {
    chosen[current] = 1;
    std::size_t next = current;
    double farthest = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (chosen[i]) continue;
      nearest[i] = std::min(nearest[i], euclidean_distance(points[i], points[current]));
      if (nearest[i] > farthest) {
        farthest = nearest[i];
        next = i;
      }
    }
    current = next;
  }
  std::vector<ObjectiveVector> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < points.size(); ++i)
    if (chosen[i]) out.push_back(points[i]);
  return out;
}

namespace detail {

// Feasibility of the candidate alpha + g*1 produced by shape sample s.
inline bool candidate_feasible(const ProblemInstance& inst, std::span<const double> alpha, double g,
                               std::span<double> f, std::span<double> regions) {
  const auto& spec = inst.spec();
  if (spec.P > 0 && inst.band_constraint(g) < 0.0) return false;
  for (std::size_t i = 0; i < alpha.size(); ++i) f[i] = alpha[i] + g;
  inst.region_constraints(f, regions);
  return std::all_of(regions.begin(), regions.end(), [](double v) { return v >= 0.0; });
}

// Upper end of the distance scan when no band bounds it: the exclusion
// regions are bounded, so beyond this every candidate is clear of them.
constexpr double kUnboundedScanLimit = 10.0;

}  // namespace detail

/// Samples the constrained front of `inst`.
///
/// The shape-parameter box is gridded with `resolution` points per axis.
/// For every sample that satisfies the segment constraints, the common
/// distance offset g is scanned upward from its lowest admissible value and
/// the first feasible candidate shape(s) + g*1 is kept (larger g at the same
/// sample is dominated). When the first feasible grid value follows an
/// infeasible one the boundary is refined by bisection. Candidates are then
/// nondominated-filtered and thinned to `cap` points.
inline ReferenceFront generate_reference_front(const ProblemInstance& inst, std::size_t resolution,
                                               std::size_t cap = kDefaultFrontCap) {
  if (resolution < 100) throw ContractError("generate_reference_front: resolution must be >= 100");
  const auto& params = inst.params();
  const auto& spec = inst.spec();
  const std::size_t dims = inst.num_shape_variables();
  const std::size_t m = inst.num_objectives();

  const bool banded = params.type2_active && spec.P > 0;
  const double g_min = banded ? params.d : 0.0;
  double g_max = g_min;
  double step = 0.0;
  if (banded) {
    g_max = params.e;
    step = std::min((params.e - params.d) / 1000.0, 1e-3);
  } else if (params.type3_active) {
    g_max = detail::kUnboundedScanLimit;
    step = 1e-3;
  }
  const std::size_t scan_steps = step > 0.0 ? static_cast<std::size_t>(std::floor((g_max - g_min) / step)) : 0;

  std::size_t total = 1;
  for (std::size_t k = 0; k < dims; ++k) total *= resolution;

  std::vector<ObjectiveVector> candidates;
  std::vector<double> s(dims), segment(spec.K), f(m), regions(spec.Q());
  std::vector<std::size_t> counter(dims, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t k = 0; k < dims; ++k) {
      counter[k] = rest % resolution;
      rest /= resolution;
      s[k] = static_cast<double>(counter[k]) / static_cast<double>(resolution - 1);
    }
    inst.segment_constraints(std::span<const double>(s).first(spec.K), segment);
    if (std::any_of(segment.begin(), segment.end(), [](double v) { return v < 0.0; })) continue;

    const ObjectiveVector alpha = inst.shape_point(s);
    double prev_g = g_min;
    for (std::size_t i = 0; i <= scan_steps; ++i) {
      const double g = std::min(g_min + static_cast<double>(i) * step, g_max);
      if (!detail::candidate_feasible(inst, alpha, g, f, regions)) {
        prev_g = g;
        continue;
      }
      double hi = g;
      if (i > 0) {
        double lo = prev_g;
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (detail::candidate_feasible(inst, alpha, mid, f, regions)) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
      }
      ObjectiveVector point(m);
      for (std::size_t j = 0; j < m; ++j) point[j] = alpha[j] + hi;
      candidates.push_back(std::move(point));
      break;
    }
  }

  ReferenceFront front;
  front.problem_id = inst.id();
  front.triplet = inst.triplet();
  front.resolution = resolution;
  front.points = thin_farthest_point(nondominated_filter(std::move(candidates)), cap);
  if (front.points.empty()) {
    throw EmptyFrontError(inst.name() + ": no feasible reference point at resolution " +
                          std::to_string(resolution));
  }
  return front;
}

/// Default per-axis resolution: 1000 for two objectives, 100 for three.
inline std::size_t default_resolution(std::size_t num_objectives) { return num_objectives <= 2 ? 1000 : 100; }

/// Fraction of uniform random decision vectors with zero violation.
inline double feasible_ratio_mc(const ProblemInstance& inst, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ContractError("feasible_ratio_mc: samples must be >= 1");
  Random rng(seed);
  std::vector<double> x(inst.num_variables()), f(inst.num_objectives()), c(inst.num_constraints());
  std::size_t feasible = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (auto& v : x) v = rng.uniform();
    inst.evaluate_into(x, f, c);
    if (overall_violation(c) == 0.0) ++feasible;
  }
  return static_cast<double>(feasible) / static_cast<double>(samples);
}

inline std::string reference_front_header(int problem_id, const DifficultyTriplet& t, std::size_t resolution) {
  return "# " + problem_name(problem_id) + " eta=" + format_shortest(t.eta) + " zeta=" + format_shortest(t.zeta) +
         " gamma=" + format_shortest(t.gamma) + " resolution=" + std::to_string(resolution);
}

inline void write_reference_front(std::ostream& out, const ReferenceFront& front) {
  out << reference_front_header(front.problem_id, front.triplet, front.resolution) << '\n';
  for (const auto& p : front.points) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) out << ' ';
      out << format_shortest(p[i]);
    }
    out << '\n';
  }
}

inline ReferenceFront read_reference_front(std::istream& in) {
  ReferenceFront front;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("# ")) throw FrontFormatError("missing reference-front header");
  {
    std::istringstream header(line.substr(2));
    std::string name;
    header >> name;
    front.problem_id = parse_problem_name(name);
    std::string field;
    bool have[4] = {false, false, false, false};
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw FrontFormatError("malformed header field '" + field + "'");
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      try {
        if (key == "eta") {
          front.triplet.eta = std::stod(value);
          have[0] = true;
        } else if (key == "zeta") {
          front.triplet.zeta = std::stod(value);
          have[1] = true;
        } else if (key == "gamma") {
          front.triplet.gamma = std::stod(value);
          have[2] = true;
        } else if (key == "resolution") {
          front.resolution = std::stoul(value);
          have[3] = true;
        }
      } catch (const std::logic_error&) {
        throw FrontFormatError("bad value in header field '" + field + "'");
      }
    }
    if (!(have[0] && have[1] && have[2] && have[3])) throw FrontFormatError("incomplete reference-front header");
  }
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream row(line);
    ObjectiveVector p;
    double v = 0.0;
    while (row >> v) p.push_back(v);
    if (!row.eof()) throw FrontFormatError("non-numeric value in reference front: '" + line + "'");
    if (p.empty()) continue;
    if (dim == 0) dim = p.size();
    if (p.size() != dim) throw FrontFormatError("inconsistent dimension in reference front");
    front.points.push_back(std::move(p));
  }
  return front;
}

inline void save_reference_front(const std::string& path, const ReferenceFront& front) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write reference front to '" + path + "'");
  write_reference_front(out, front);
  if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

inline ReferenceFront load_reference_front(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference front '" + path + "'");
  return read_reference_front(in);
}

}  // namespace dascmop
