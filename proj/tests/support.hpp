#pragma once

// Seeded generators and brute-force reference implementations shared by the
// test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "dascmop/core.hpp"
#include "dascmop/random.hpp"

namespace testsupport {

using dascmop::EvaluatedSolution;
using dascmop::ObjectiveVector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double unit() { return rng_.uniform(); }
  double range(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  std::size_t below(std::size_t n) { return rng_.index(n); }
  bool coin(double p = 0.5) { return rng_.bernoulli(p); }

  std::vector<double> vec(std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = range(lo, hi);
    return v;
  }

  // Coarse integer-valued coordinates so duplicates and ties occur.
  std::vector<double> grid_vec(std::size_t n, int levels) {
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(below(static_cast<std::size_t>(levels)));
    return v;
  }

  std::vector<ObjectiveVector> points(std::size_t count, std::size_t m) {
    std::vector<ObjectiveVector> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(vec(m));
    return out;
  }

  // A solution with random objectives; feasible with probability 1/2, and
  // violations drawn from a small set so ties occur.
  EvaluatedSolution solution(std::size_t m, int levels = 6) {
    EvaluatedSolution s;
    s.f = grid_vec(m, levels);
    s.violation = coin() ? 0.0 : 0.25 * static_cast<double>(1 + below(4));
    s.c = {-s.violation};
    return s;
  }

  dascmop::Random& raw() { return rng_; }

 private:
  dascmop::Random rng_;
};

inline double naive_igd(const std::vector<ObjectiveVector>& ref, const std::vector<ObjectiveVector>& approx) {
  double total = 0.0;
  for (const auto& r : ref) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : approx) {
      double sq = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) sq += (r[k] - a[k]) * (r[k] - a[k]);
      best = std::min(best, std::sqrt(sq));
    }
    total += best;
  }
  return total / static_cast<double>(ref.size());
}

inline bool naive_dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

// Pairwise check: keep every point no input point dominates, one copy each,
// sorted for comparison.
inline std::vector<ObjectiveVector> naive_nondominated(const std::vector<ObjectiveVector>& pts) {
  std::vector<ObjectiveVector> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) dominated = naive_dominates(pts[j], pts[i]);
    if (!dominated && std::find(out.begin(), out.end(), pts[i]) == out.end()) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool naive_cdp_better(const EvaluatedSolution& a, const EvaluatedSolution& b) {
  const bool fa = a.violation == 0.0;
  const bool fb = b.violation == 0.0;
  if (fa && !fb) return true;
  if (!fa && fb) return false;
  if (!fa) return a.violation < b.violation;
  return naive_dominates(a.f, b.f);
}

// Repeatedly removes the members nobody remaining beats.
inline std::vector<std::vector<std::size_t>> peel_fronts(const std::vector<EvaluatedSolution>& pop) {
  std::vector<bool> removed(pop.size(), false);
  std::vector<std::vector<std::size_t>> fronts;
  std::size_t left = pop.size();
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (removed[i]) continue;
      bool beaten = false;
      for (std::size_t j = 0; j < pop.size() && !beaten; ++j)
        if (!removed[j] && j != i) beaten = naive_cdp_better(pop[j], pop[i]);
      if (!beaten) front.push_back(i);
    }
    for (std::size_t i : front) removed[i] = true;
    left -= front.size();
    fronts.push_back(front);
  }
  return fronts;
}

// Two-sided exact rank-sum p-value by recursive enumeration of the subsets
// of pooled positions assigned to the first sample. Ranks are computed by
// counting, independent of any sorting.
inline double exact_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t total = pooled.size();
  std::vector<double> rank(total);
  for (std::size_t i = 0; i < total; ++i) {
    double less = 0.0;
    double equal = 0.0;
    for (double v : pooled) {
      if (v < pooled[i]) less += 1.0;
      if (v == pooled[i]) equal += 1.0;
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  double observed = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) observed += rank[i];
  const double center = static_cast<double>(a.size()) * (static_cast<double>(total) + 1.0) / 2.0;
  const double dev = std::abs(observed - center);

  double hits = 0.0;
  double all = 0.0;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t pos, std::size_t need, double sum) {
    if (need == 0) {
      all += 1.0;
      if (std::abs(sum - center) >= dev - 1e-9) hits += 1.0;
      return;
    }
    if (total - pos < need) return;
    walk(pos + 1, need - 1, sum + rank[pos]);
    walk(pos + 1, need, sum);
  };
  walk(0, a.size(), 0.0);
  return hits / all;
}

}  // namespace testsupport
