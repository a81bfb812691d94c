// Builds one instance, evaluates a point, generates its reference front and
// runs both solvers on a short budget.

#include <cstdio>
#include <vector>

#include "dascmop/algorithms.hpp"
#include "dascmop/metrics.hpp"
#include "dascmop/problems.hpp"

int main() {
  using namespace dascmop;

  const DifficultyTriplet triplet{0.25, 0.5, 0.25};
  const auto inst = make_das_cmop(1, triplet);

  std::vector<double> x(inst.num_variables(), 0.5);
  const auto sol = inst.evaluate_solution(x);
  std::printf("%s at x = 0.5: f = (%.4f, %.4f), violation %.4f\n", problem_name(1).c_str(), sol.f[0], sol.f[1],
              sol.violation);

  const auto front = generate_reference_front(inst, default_resolution(inst.num_objectives()));
  std::printf("reference front: %zu points\n", front.points.size());

  auto cfg = default_config(inst.num_objectives(), inst.num_variables());
  cfg.max_evaluations = 20000;
  cfg.seed = 1;
  for (Algorithm algo : {Algorithm::moead_cdp, Algorithm::nsga2_cdp}) {
    const auto result = run_algorithm(algo, inst, cfg, front.points);
    std::printf("%-12s IGD %.4f after %zu evaluations\n", algorithm_label(algo).c_str(),
                population_igd(front.points, result.population), result.evaluations);
  }
}
