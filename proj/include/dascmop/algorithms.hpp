#pragma once

// Reference solvers: MOEA/D with constraint-dominance replacement and
// NSGA-II with constraint-dominance sorting, plus the shared real-coded
// variation operators and simplex-lattice weight vectors.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dascmop/core.hpp"
#include "dascmop/metrics.hpp"
#include "dascmop/random.hpp"
#include "dascmop/toolkit.hpp"

namespace dascmop {

/// Anything with box [0,1]^n that evaluates objectives and constraints into
/// caller buffers.
template <class P>
concept Problem = requires(const P& p, std::span<const double> x, std::span<double> out) {
  { p.num_variables() } -> std::convertible_to<std::size_t>;
  { p.num_objectives() } -> std::convertible_to<std::size_t>;
  { p.num_constraints() } -> std::convertible_to<std::size_t>;
  p.evaluate_into(x, out, out);
};

struct AlgoConfig {
  std::size_t population_size = 200;
  std::size_t max_evaluations = 100000;
  double crossover_rate = 0.9;
  double mutation_probability = 1.0 / 30.0;
  double sbx_index = 20.0;
  double mutation_index = 20.0;
  std::size_t neighborhood_size = 20;
  double neighbor_probability = 0.9;
  std::size_t max_replacements = 2;
  std::uint64_t seed = 0;
  std::size_t trace_interval = 1000;

  void validate() const {
    if (population_size < 2) throw ConstructionError("population size must be >= 2");
    if (max_evaluations < population_size)
      throw ConstructionError("evaluation budget must cover the initial population");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConstructionError("CR must lie in [0,1]");
    if (!(neighbor_probability >= 0.0 && neighbor_probability <= 1.0))
      throw ConstructionError("delta must lie in [0,1]");
    if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0))
      throw ConstructionError("mutation probability must lie in [0,1]");
    if (neighborhood_size < 2 || neighborhood_size > population_size)
      throw ConstructionError("neighborhood size must lie in [2, N]");
    if (max_replacements < 1) throw ConstructionError("nr must be >= 1");
    if (trace_interval == 0) throw ConstructionError("trace interval must be positive");
  }
};

/// Evaluation-protocol settings: N = 200, 100000 evaluations and T = 20 for
/// two objectives; N = 105, 200000 evaluations and T = 10 for three.
inline AlgoConfig default_config(std::size_t num_objectives, std::size_t num_variables) {
  AlgoConfig cfg;
  const bool three = num_objectives >= 3;
  cfg.population_size = three ? 105 : 200;
  cfg.max_evaluations = three ? 200000 : 100000;
  cfg.neighborhood_size = three ? 10 : 20;
  cfg.mutation_probability = 1.0 / static_cast<double>(num_variables);
  return cfg;
}

struct TracePoint {
  std::size_t evaluations = 0;
  double igd = 0.0;
};

struct RunResult {
  std::vector<EvaluatedSolution> population;
  std::vector<TracePoint> igd_trace;
  std::size_t evaluations = 0;
};

// ---------------------------------------------------------------------------
// Variation operators

/// SBX spread factor for a uniform draw u in [0,1).
inline double sbx_spread_factor(double u, double index) {
  const double exponent = 1.0 / (index + 1.0);
  return u <= 0.5 ? std::pow(2.0 * u, exponent) : std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
}

/// One-variable SBX recombination before clipping; the children's sum
/// equals the parents' sum.
inline std::pair<double, double> sbx_pair(double p1, double p2, double u, double index) {
  const double beta = sbx_spread_factor(u, index);
  return {0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2), 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)};
}

inline double clip_unit(double v) { return std::clamp(v, 0.0, 1.0); }

inline std::pair<DecisionVector, DecisionVector> sbx_crossover(const DecisionVector& p1, const DecisionVector& p2,
                                                               double crossover_rate, double index, Random& rng) {
  if (p1.size() != p2.size()) throw ContractError("sbx_crossover: parents differ in length");
  DecisionVector c1 = p1;
  DecisionVector c2 = p2;
  if (!rng.bernoulli(crossover_rate)) return {std::move(c1), std::move(c2)};
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (!rng.bernoulli(0.5)) continue;
    const auto [a, b] = sbx_pair(p1[i], p2[i], rng.uniform(), index);
    c1[i] = clip_unit(a);
    c2[i] = clip_unit(b);
  }
  return {std::move(c1), std::move(c2)};
}

/// Bounded polynomial perturbation of x in [0,1] for draw u; u = 0.5 leaves
/// x unchanged.
inline double polynomial_perturbation(double x, double u, double index) {
  const double exponent = 1.0 / (index + 1.0);
  double delta_q = 0.0;
  if (u < 0.5) {
    const double xy = 1.0 - x;
    const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, index + 1.0);
    delta_q = std::pow(val, exponent) - 1.0;
  } else {
    const double xy = x;
    const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, index + 1.0);
    delta_q = 1.0 - std::pow(val, exponent);
  }
  return clip_unit(x + delta_q);
}

inline DecisionVector polynomial_mutation(DecisionVector x, double probability, double index, Random& rng) {
  for (auto& v : x) {
    if (rng.bernoulli(probability)) v = polynomial_perturbation(v, rng.uniform(), index);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Weight vectors

/// All m-vectors with components in {0, 1/H, ..., 1} summing to one, in
/// lexicographic order of the component counts.
inline std::vector<std::vector<double>> simplex_lattice(std::size_t m, std::size_t H) {
  if (m < 2 || H < 1) throw ConstructionError("simplex_lattice: need m >= 2 and H >= 1");
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> counts(m, 0);
  auto recurse = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos == m - 1) {
      counts[pos] = left;
      std::vector<double> w(m);
      for (std::size_t i = 0; i < m; ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(H);
      out.push_back(std::move(w));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  recurse(recurse, 0, H);
  return out;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// N uniformly spread weight vectors. For m = 2 this is
/// (i/(N-1), 1 - i/(N-1)); for m >= 3, N must equal C(H+m-1, m-1).
inline std::vector<std::vector<double>> generate_weight_vectors(std::size_t m, std::size_t N) {
  if (m < 2) throw ConstructionError("weight vectors need m >= 2");
  if (m == 2) {
    if (N < 2) throw ConstructionError("need at least two weight vectors");
    std::vector<std::vector<double>> out(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double w = static_cast<double>(i) / static_cast<double>(N - 1);
      out[i] = {w, 1.0 - w};
    }
    return out;
  }
  for (std::size_t H = 1;; ++H) {
    const std::size_t count = binomial(H + m - 1, m - 1);
    if (count == N) return simplex_lattice(m, H);
    if (count > N) break;
  }
  throw ConstructionError("N = " + std::to_string(N) + " is not a simplex-lattice size for m = " + std::to_string(m));
}

/// Indices of the T weight vectors closest to each vector (itself included).
inline std::vector<std::vector<std::size_t>> weight_neighborhoods(const std::vector<std::vector<double>>& weights,
                                                                  std::size_t T) {
  std::vector<std::vector<std::size_t>> out(weights.size());
  std::vector<std::pair<double, std::size_t>> dist(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t j = 0; j < weights.size(); ++j) dist[j] = {euclidean_distance(weights[i], weights[j]), j};
    std::sort(dist.begin(), dist.end());
    out[i].reserve(T);
    for (std::size_t k = 0; k < T; ++k) out[i].push_back(dist[k].second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers

/// IGD of the feasible nondominated members against `reference`; +inf when
/// no member is feasible.
inline double population_igd(std::span<const ObjectiveVector> reference,
                             std::span<const EvaluatedSolution> population) {
  std::vector<ObjectiveVector> feasible;
  for (const auto& s : population)
    if (s.feasible()) feasible.push_back(s.f);
  if (feasible.empty()) return std::numeric_limits<double>::infinity();
  const auto front = nondominated_filter(std::move(feasible));
  return igd(reference, front);
}

namespace detail {

template <Problem P>
class CountingEvaluator {
 public:
  explicit CountingEvaluator(const P& problem) : problem_(problem) {}

  EvaluatedSolution operator()(DecisionVector x) {
    EvaluatedSolution s;
    s.f.resize(problem_.num_objectives());
    s.c.resize(problem_.num_constraints());
    problem_.evaluate_into(x, s.f, s.c);
    s.violation = overall_violation(s.c);
    s.x = std::move(x);
    ++count_;
    return s;
  }

  [[nodiscard]] std::size_t count() const noexcept { return count_; }

 private:
  const P& problem_;
  std::size_t count_ = 0;
};

class TraceRecorder {
 public:
  TraceRecorder(std::span<const ObjectiveVector> reference, std::size_t interval)
      : reference_(reference), interval_(interval) {}

  // Records one point per interval boundary crossed since the last call.
  void update(std::size_t evaluations, std::span<const EvaluatedSolution> population) {
    if (reference_.empty()) return;
    if (evaluations / interval_ <= last_mark_) return;
    last_mark_ = evaluations / interval_;
    trace_.push_back({last_mark_ * interval_, population_igd(reference_, population)});
  }

  void finish(std::size_t evaluations, std::span<const EvaluatedSolution> population) {
    if (reference_.empty()) return;
    if (!trace_.empty() && trace_.back().evaluations == evaluations) return;
    trace_.push_back({evaluations, population_igd(reference_, population)});
  }

  std::vector<TracePoint> take() { return std::move(trace_); }

 private:
  std::span<const ObjectiveVector> reference_;
  std::size_t interval_;
  std::size_t last_mark_ = 0;
  std::vector<TracePoint> trace_;
};

template <Problem P>
std::vector<EvaluatedSolution> random_population(CountingEvaluator<P>& eval, std::size_t N, std::size_t n,
                                                 Random& rng) {
  std::vector<EvaluatedSolution> pop;
  pop.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    DecisionVector x(n);
    for (auto& v : x) v = rng.uniform();
    pop.push_back(eval(std::move(x)));
  }
  return pop;
}

template <Problem P>
void check_config(const P& problem, const AlgoConfig& cfg) {
  cfg.validate();
  if (problem.num_variables() < problem.num_objectives())
    throw ContractError("problem must have at least as many variables as objectives");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MOEA/D-CDP

/// Weighted Tchebycheff value max_i w_i |f_i - z_i|; a zero weight counts
/// as 1e-4.
inline double tchebycheff(std::span<const double> f, std::span<const double> weight, std::span<const double> ideal) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = weight[i] == 0.0 ? 1e-4 : weight[i];
    worst = std::max(worst, w * std::abs(f[i] - ideal[i]));
  }
  return worst;
}

/// Constraint-dominance replacement test for subproblem `weight`: a feasible
/// child beats an infeasible incumbent, smaller violation wins between
/// infeasible ones, and the smaller Tchebycheff value wins between feasible
/// ones.
inline bool moead_child_replaces(const EvaluatedSolution& child, const EvaluatedSolution& incumbent,
                                 std::span<const double> weight, std::span<const double> ideal) {
  const bool fc = child.feasible();
  const bool fi = incumbent.feasible();
  if (fc != fi) return fc;
  if (!fc) return child.violation < incumbent.violation;
  return tchebycheff(child.f, weight, ideal) < tchebycheff(incumbent.f, weight, ideal);
}

/// Offers `child` to the subproblems in `pool_order`, replacing at most
/// `max_replacements` of them. Returns the number replaced.
inline std::size_t moead_update_neighbors(std::vector<EvaluatedSolution>& population,
                                          const std::vector<std::vector<double>>& weights,
                                          std::span<const std::size_t> pool_order, const EvaluatedSolution& child,
                                          std::span<const double> ideal, std::size_t max_replacements) {
  std::size_t replaced = 0;
  for (std::size_t j : pool_order) {
    if (replaced >= max_replacements) break;
    if (moead_child_replaces(child, population[j], weights[j], ideal)) {
      population[j] = child;
      ++replaced;
    }
  }
  return replaced;
}

template <Problem P>
RunResult moead_cdp_run(const P& problem, const AlgoConfig& cfg, std::span<const ObjectiveVector> reference = {}) {
  detail::check_config(problem, cfg);
  const std::size_t N = cfg.population_size;
  const std::size_t m = problem.num_objectives();
  const std::size_t n = problem.num_variables();

  Random rng(cfg.seed);
  detail::CountingEvaluator<P> eval(problem);
  detail::TraceRecorder trace(reference, cfg.trace_interval);

  const auto weights = generate_weight_vectors(m, N);
  const auto neighbors = weight_neighborhoods(weights, cfg.neighborhood_size);
  auto population = detail::random_population(eval, N, n, rng);
  trace.update(eval.count(), population);

  std::vector<double> ideal(m, std::numeric_limits<double>::infinity());
  for (const auto& s : population)
    for (std::size_t k = 0; k < m; ++k) ideal[k] = std::min(ideal[k], s.f[k]);

  std::vector<std::size_t> everyone(N);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  std::vector<std::size_t> order;
  std::vector<std::size_t> visit(everyone);

  while (eval.count() < cfg.max_evaluations) {
    // Subproblems are visited in a fresh random order every generation.
    for (std::size_t k = visit.size(); k > 1; --k) std::swap(visit[k - 1], visit[rng.index(k)]);
    for (std::size_t i : visit) {
      if (eval.count() >= cfg.max_evaluations) break;
      const auto& pool = rng.bernoulli(cfg.neighbor_probability) ? neighbors[i] : everyone;
      const std::size_t a = pool[rng.index(pool.size())];
      std::size_t b = pool[rng.index(pool.size())];
      while (b == a) b = pool[rng.index(pool.size())];

      auto children = sbx_crossover(population[a].x, population[b].x, cfg.crossover_rate, cfg.sbx_index, rng);
      auto child = eval(polynomial_mutation(std::move(children.first), cfg.mutation_probability,
                                            cfg.mutation_index, rng));
      for (std::size_t k = 0; k < m; ++k) ideal[k] = std::min(ideal[k], child.f[k]);

      order.assign(pool.begin(), pool.end());
      for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.index(k)]);
      moead_update_neighbors(population, weights, order, child, ideal, cfg.max_replacements);
      trace.update(eval.count(), population);
    }
  }
  trace.finish(eval.count(), population);
  return {std::move(population), trace.take(), eval.count()};
}

// ---------------------------------------------------------------------------
// NSGA-II-CDP

/// Fronts of the constraint-dominance relation, best first, each listing
/// indices in ascending order.
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const EvaluatedSolution> pop) {
  const std::size_t size = pop.size();
  std::vector<std::vector<std::size_t>> dominated_by(size);
  std::vector<std::size_t> domination_count(size, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) {
      switch (cdp_compare(pop[i], pop[j])) {
        case CdpOrder::first_better:
          dominated_by[i].push_back(j);
          ++domination_count[j];
          break;
        case CdpOrder::second_better:
          dominated_by[j].push_back(i);
          ++domination_count[i];
          break;
        case CdpOrder::tie: break;
      }
    }
  }
  for (std::size_t i = 0; i < size; ++i)
    if (domination_count[i] == 0) current.push_back(i);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated_by[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

/// Crowding distance of each point within its front. Extreme points along
/// any objective get +inf; others sum the normalized gaps between their
/// neighbours along each objective.
inline std::vector<double> crowding_distance(std::span<const ObjectiveVector> front) {
  if (front.empty()) throw ContractError("crowding_distance: empty front");
  const std::size_t size = front.size();
  const std::size_t m = front.front().size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(size, 0.0);
  if (size <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  std::vector<std::size_t> idx(size);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Ties fall back to the whole vector, then the index, so duplicates take
    // the same roles in every objective whatever the input order.
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (front[a][k] != front[b][k]) return front[a][k] < front[b][k];
      if (front[a] != front[b]) return front[a] < front[b];
      return a < b;
    });
    const double lo = front[idx.front()][k];
    const double hi = front[idx.back()][k];
    dist[idx.front()] = inf;
    dist[idx.back()] = inf;
    if (hi == lo) continue;
    for (std::size_t r = 1; r + 1 < size; ++r) {
      dist[idx[r]] += (front[idx[r + 1]][k] - front[idx[r - 1]][k]) / (hi - lo);
    }
  }
  return dist;
}

namespace detail {

struct RankedPopulation {
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

// Sorts `pool` by constraint-dominance fronts and keeps `keep` members,
// truncating the last admitted front by descending crowding distance.
inline RankedPopulation environmental_selection(std::vector<EvaluatedSolution>& pool, std::size_t keep) {
  const auto fronts = fast_nondominated_sort(pool);
  std::vector<EvaluatedSolution> survivors;
  RankedPopulation ranked;
  survivors.reserve(keep);
  for (std::size_t r = 0; r < fronts.size() && survivors.size() < keep; ++r) {
    const auto& front = fronts[r];
    std::vector<ObjectiveVector> objs;
    objs.reserve(front.size());
    for (std::size_t i : front) objs.push_back(pool[i].f);
    const auto crowd = crowding_distance(objs);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (survivors.size() + front.size() > keep) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      order.resize(keep - survivors.size());
    }
    for (std::size_t o : order) {
      survivors.push_back(std::move(pool[front[o]]));
      ranked.rank.push_back(r);
      ranked.crowding.push_back(crowd[o]);
    }
  }
  pool = std::move(survivors);
  return ranked;
}

inline std::size_t binary_tournament(const RankedPopulation& ranked, std::size_t size, Random& rng) {
  const std::size_t a = rng.index(size);
  std::size_t b = rng.index(size);
  while (b == a) b = rng.index(size);
  if (ranked.rank[a] != ranked.rank[b]) return ranked.rank[a] < ranked.rank[b] ? a : b;
  if (ranked.crowding[a] != ranked.crowding[b]) return ranked.crowding[a] > ranked.crowding[b] ? a : b;
  return rng.bernoulli(0.5) ? a : b;
}

}  // namespace detail

template <Problem P>
RunResult nsga2_cdp_run(const P& problem, const AlgoConfig& cfg, std::span<const ObjectiveVector> reference = {}) {
  detail::check_config(problem, cfg);
  const std::size_t N = cfg.population_size;
  const std::size_t n = problem.num_variables();

  Random rng(cfg.seed);
  detail::CountingEvaluator<P> eval(problem);
  detail::TraceRecorder trace(reference, cfg.trace_interval);

  auto population = detail::random_population(eval, N, n, rng);
  auto ranked = detail::environmental_selection(population, N);
  trace.update(eval.count(), population);

  while (eval.count() < cfg.max_evaluations) {
    const std::size_t offspring = std::min(N, cfg.max_evaluations - eval.count());
    std::vector<EvaluatedSolution> pool = population;
    pool.reserve(N + offspring);
    std::size_t produced = 0;
    while (produced < offspring) {
      const std::size_t a = detail::binary_tournament(ranked, N, rng);
      const std::size_t b = detail::binary_tournament(ranked, N, rng);
      auto children = sbx_crossover(population[a].x, population[b].x, cfg.crossover_rate, cfg.sbx_index, rng);
      pool.push_back(eval(polynomial_mutation(std::move(children.first), cfg.mutation_probability,
                                              cfg.mutation_index, rng)));
      if (++produced == offspring) break;
      pool.push_back(eval(polynomial_mutation(std::move(children.second), cfg.mutation_probability,
                                              cfg.mutation_index, rng)));
      ++produced;
    }
    ranked = detail::environmental_selection(pool, N);
    population = std::move(pool);
    trace.update(eval.count(), population);
  }
  trace.finish(eval.count(), population);
  return {std::move(population), trace.take(), eval.count()};
}

enum class Algorithm { moead_cdp, nsga2_cdp };

inline std::string algorithm_name(Algorithm a) { return a == Algorithm::moead_cdp ? "moead-cdp" : "nsga2-cdp"; }

inline std::string algorithm_label(Algorithm a) { return a == Algorithm::moead_cdp ? "MOEA/D-CDP" : "NSGA-II-CDP"; }

inline Algorithm parse_algorithm(const std::string& name) {
  if (name == "moead-cdp") return Algorithm::moead_cdp;
  if (name == "nsga2-cdp") return Algorithm::nsga2_cdp;
  throw ContractError("unknown algorithm '" + name + "' (expected moead-cdp or nsga2-cdp)");
}

template <Problem P>
RunResult run_algorithm(Algorithm algo, const P& problem, const AlgoConfig& cfg,
                        std::span<const ObjectiveVector> reference = {}) {
  return algo == Algorithm::moead_cdp ? moead_cdp_run(problem, cfg, reference)
                                      : nsga2_cdp_run(problem, cfg, reference);
}

}  // namespace dascmop
