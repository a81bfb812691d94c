// Command-line front end: evaluate points, build reference fronts, run
// experiments and summarize their results.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dascmop/harness.hpp"

namespace {

using namespace dascmop;

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_vector(std::ostream& out, const char* label, const std::vector<double>& v) {
  out << label << ':';
  for (double x : v) out << ' ' << format_shortest(x);
  out << '\n';
}

struct TripletArgs {
  std::string problem = "das-cmop1";
  double eta = 0.0;
  double zeta = 0.0;
  double gamma = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--problem", problem, "das-cmop1 .. das-cmop9")->required();
    cmd->add_option("--eta", eta, "feasibility-hardness level in [0,1]")->default_val(0.0);
    cmd->add_option("--zeta", zeta, "convergence-hardness level in [0,1]")->default_val(0.0);
    cmd->add_option("--gamma", gamma, "diversity-hardness level in [0,1]")->default_val(0.0);
  }

  [[nodiscard]] DifficultyTriplet triplet() const {
    DifficultyTriplet t{eta, zeta, gamma};
    t.validate();
    return t;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DAS-CMOP benchmark toolkit"};
  app.require_subcommand(1);

  TripletArgs eval_args;
  std::string x_text;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate one decision vector");
  eval_args.attach(evaluate);
  evaluate->add_option("--x", x_text, "comma-separated decision variables")->required();

  TripletArgs front_args;
  std::optional<std::size_t> front_resolution;
  std::string front_out;
  auto* ref_front = app.add_subcommand("ref-front", "generate a reference front");
  front_args.attach(ref_front);
  ref_front->add_option("--resolution", front_resolution, "samples per shape dimension (default 1000 / 100)");
  ref_front->add_option("--out", front_out, "output path (stdout when omitted)");

  std::string problems_text = "1-9";
  std::string triplets_source = "builtin16";
  std::string algos_text = "moead-cdp,nsga2-cdp";
  ExperimentSpec spec;
  std::string run_out;
  std::string run_format = "csv";
  bool no_generate = false;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run an experiment grid");
  run->add_option("--problems", problems_text, "problem ids, e.g. 1-9 or 1,4,7")->capture_default_str();
  run->add_option("--triplets", triplets_source, "builtin16 or a file of 'eta zeta gamma' lines")
      ->capture_default_str();
  run->add_option("--algos", algos_text, "comma-separated algorithms")->capture_default_str();
  run->add_option("--runs", spec.runs, "runs per cell")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--seed", spec.base_seed, "base seed")->capture_default_str();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--workers", spec.workers, "parallel runs")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--budget-override", spec.budget_override, "evaluations per run for every problem")
      ->check(CLI::PositiveNumber);
  run->add_option("--resolution", spec.resolution, "reference-front resolution");
  run->add_option("--cache", spec.cache_dir, "reference-front cache directory");
  run->add_flag("--no-generate", no_generate, "fail instead of generating missing reference fronts");
  run->add_option("--format", run_format, "stats format")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();
  run->add_flag("--quiet", quiet, "no per-run progress lines");

  std::string stats_in;
  double alpha = 0.05;
  std::string stats_format = "csv";
  auto* stats = app.add_subcommand("stats", "summarize an experiment directory");
  stats->add_option("--in", stats_in, "experiment directory")->required();
  stats->add_option("--alpha", alpha, "significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  stats->add_option("--format", stats_format, "csv or md")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();

  std::string table_in;
  double table_alpha = 0.05;
  auto* table = app.add_subcommand("table", "print the mean/std table with significance daggers");
  table->add_option("--in", table_in, "experiment directory")->required();
  table->add_option("--alpha", table_alpha, "significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) {
      const auto inst = make_das_cmop(parse_problem_name(eval_args.problem), eval_args.triplet());
      const auto x = parse_reals(x_text);
      const auto sol = inst.evaluate_solution(x);
      print_vector(std::cout, "objectives", sol.f);
      print_vector(std::cout, "constraints", sol.c);
      std::cout << "violation: " << format_shortest(sol.violation) << '\n';
      std::cout << "feasible: " << (sol.feasible() ? "yes" : "no") << '\n';
    } else if (*ref_front) {
      const int id = parse_problem_name(front_args.problem);
      const auto inst = make_das_cmop(id, front_args.triplet());
      const auto front =
          generate_reference_front(inst, front_resolution.value_or(default_resolution(inst.num_objectives())));
      if (front_out.empty()) {
        write_reference_front(std::cout, front);
      } else {
        save_reference_front(front_out, front);
        std::cerr << front.points.size() << " points written to " << front_out << '\n';
      }
    } else if (*run) {
      spec.problems = parse_problem_list(problems_text);
      spec.triplets = load_triplets(triplets_source);
      spec.algorithms = parse_algorithm_list(algos_text);
      spec.out_dir = run_out;
      spec.generate_fronts = !no_generate;
      const auto records = run_experiment(spec, quiet ? nullptr : &std::cerr);
      const auto summary = summarize(records);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
      emit_outputs(summary, records, spec.out_dir, parse_table_format(run_format));
      std::cerr << records.size() << " records in " << (spec.out_dir / kJournalName).string() << '\n';
    } else if (*stats) {
      const auto records = load_records(stats_in);
      const auto summary = summarize(records, alpha);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
      const auto format = parse_table_format(stats_format);
      emit_outputs(summary, records, stats_in, format);
      write_stats(std::cout, summary, format);
    } else if (*table) {
      const auto records = load_records(table_in);
      const auto summary = summarize(records, table_alpha);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
      write_dagger_table(std::cout, summary);
    }
  } catch (const EmptyFrontError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
