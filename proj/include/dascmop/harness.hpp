#pragma once

// Experiment orchestration: reference-front caching, seeded runs with a
// resumable journal, rank-sum significance testing, summary tables and
// result files.

#include <algorithm>
#include <cctype>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dascmop/algorithms.hpp"
#include "dascmop/core.hpp"
#include "dascmop/format.hpp"
#include "dascmop/metrics.hpp"
#include "dascmop/problems.hpp"
#include "dascmop/random.hpp"

namespace dascmop {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Experiment description and records

struct ExperimentSpec {
  std::vector<int> problems;
  std::vector<DifficultyTriplet> triplets = builtin_triplets();
  std::vector<Algorithm> algorithms{Algorithm::moead_cdp, Algorithm::nsga2_cdp};
  std::size_t runs = 30;
  std::uint64_t base_seed = 42;
  std::optional<std::size_t> budget_override;
  std::optional<std::size_t> resolution;
  fs::path out_dir;
  fs::path cache_dir;
  bool generate_fronts = true;
  std::size_t workers = 1;

  void validate() const {
    if (problems.empty()) throw ConfigError("experiment has no problems");
    for (int id : problems)
      if (id < 1 || id > kNumNamedProblems) throw ConfigError("problem id out of range: " + std::to_string(id));
    if (triplets.empty()) throw ConfigError("experiment has no triplets");
    for (const auto& t : triplets) t.validate();
    if (algorithms.empty()) throw ConfigError("experiment has no algorithms");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (budget_override && *budget_override == 0) throw ConfigError("budget must be positive");
    if (resolution && *resolution < 100) throw ConfigError("reference resolution must be >= 100");
    if (out_dir.empty()) throw ConfigError("experiment needs an output directory");
  }

  /// 100000 evaluations for the two-objective instances, 200000 for the
  /// three-objective ones, unless overridden.
  [[nodiscard]] std::size_t budget_for(int id) const {
    if (budget_override) return *budget_override;
    return id <= 6 ? 100000 : 200000;
  }

  /// DASCMOP_CACHE, then an explicit cache_dir, then <out>/reference_fronts.
  [[nodiscard]] fs::path effective_cache_dir() const {
    if (const char* env = std::getenv("DASCMOP_CACHE"); env && *env) return env;
    if (!cache_dir.empty()) return cache_dir;
    return out_dir / "reference_fronts";
  }
};

enum class IgdStatus { ok, no_feasible, empty_reference };

inline std::string igd_status_name(IgdStatus s) {
  switch (s) {
    case IgdStatus::ok: return "ok";
    case IgdStatus::no_feasible: return "no_feasible";
    case IgdStatus::empty_reference: return "empty_reference";
  }
  return "ok";
}

inline IgdStatus parse_igd_status(const std::string& s) {
  if (s == "ok") return IgdStatus::ok;
  if (s == "no_feasible") return IgdStatus::no_feasible;
  if (s == "empty_reference") return IgdStatus::empty_reference;
  throw std::invalid_argument("unknown IGD status '" + s + "'");
}

/// One solver run. `final_igd` is the IGD of the feasible nondominated
/// members of the final population, NaN when it is undefined (see status).
struct RunRecord {
  int problem = 0;
  DifficultyTriplet triplet;
  Algorithm algorithm = Algorithm::moead_cdp;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double final_igd = std::numeric_limits<double>::quiet_NaN();
  IgdStatus status = IgdStatus::ok;
  std::vector<TracePoint> trace;
  double wall_time = 0.0;
  std::size_t evaluations = 0;
  std::vector<ObjectiveVector> final_objectives;
};

inline nlohmann::json record_to_json(const RunRecord& r) {
  nlohmann::json j;
  j["problem"] = problem_name(r.problem);
  j["eta"] = r.triplet.eta;
  j["zeta"] = r.triplet.zeta;
  j["gamma"] = r.triplet.gamma;
  j["algorithm"] = algorithm_name(r.algorithm);
  j["run"] = r.run;
  j["seed"] = r.seed;
  j["final_igd"] = std::isfinite(r.final_igd) ? nlohmann::json(r.final_igd) : nlohmann::json(nullptr);
  j["igd_status"] = igd_status_name(r.status);
  auto trace = nlohmann::json::array();
  for (const auto& t : r.trace) {
    trace.push_back({t.evaluations, std::isfinite(t.igd) ? nlohmann::json(t.igd) : nlohmann::json(nullptr)});
  }
  j["igd_trace"] = std::move(trace);
  j["wall_time"] = r.wall_time;
  j["evaluations"] = r.evaluations;
  j["final_objectives"] = r.final_objectives;
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  r.problem = parse_problem_name(j.at("problem").get<std::string>());
  r.triplet = {j.at("eta").get<double>(), j.at("zeta").get<double>(), j.at("gamma").get<double>()};
  r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  r.run = j.at("run").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.final_igd = j.at("final_igd").is_null() ? nan : j.at("final_igd").get<double>();
  r.status = parse_igd_status(j.at("igd_status").get<std::string>());
  for (const auto& t : j.at("igd_trace")) {
    r.trace.push_back({t.at(0).get<std::size_t>(), t.at(1).is_null() ? nan : t.at(1).get<double>()});
  }
  r.wall_time = j.at("wall_time").get<double>();
  r.evaluations = j.at("evaluations").get<std::size_t>();
  r.final_objectives = j.at("final_objectives").get<std::vector<ObjectiveVector>>();
  return r;
}

/// Canonical ordering: problem, triplet (evaluation-grid order first), algorithm, run.
inline std::size_t triplet_order_key(const DifficultyTriplet& t) {
  const auto grid = builtin_triplets();
  const auto it = std::find(grid.begin(), grid.end(), t);
  return it == grid.end() ? grid.size() : static_cast<std::size_t>(it - grid.begin());
}

inline bool triplet_less(const DifficultyTriplet& a, const DifficultyTriplet& b) {
  const auto ka = triplet_order_key(a);
  const auto kb = triplet_order_key(b);
  if (ka != kb) return ka < kb;
  return std::tie(a.eta, a.zeta, a.gamma) < std::tie(b.eta, b.zeta, b.gamma);
}

inline bool record_less(const RunRecord& a, const RunRecord& b) {
  if (a.problem != b.problem) return a.problem < b.problem;
  if (!(a.triplet == b.triplet)) return triplet_less(a.triplet, b.triplet);
  if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
  return a.run < b.run;
}

inline std::string cell_key(int problem, const DifficultyTriplet& t) {
  return problem_name(problem) + "|" + format_shortest(t.eta) + "|" + format_shortest(t.zeta) + "|" +
         format_shortest(t.gamma);
}

/// base_seed XOR a stable hash of (problem, triplet, algorithm, run).
inline std::uint64_t derive_seed(std::uint64_t base_seed, int problem, const DifficultyTriplet& t, Algorithm algo,
                                 std::size_t run) {
  const std::string key = cell_key(problem, t) + "|" + algorithm_name(algo) + "|" + std::to_string(run);
  return base_seed ^ splitmix64(stable_hash(key));
}

/// Parses "1-9", "1,3,5-7" or "das-cmop2,das-cmop4" into problem ids.
inline std::vector<int> parse_problem_list(const std::string& text) {
  std::vector<int> ids;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::string bare = item;
    for (auto& ch : bare) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (auto pos = bare.find("das-cmop"); pos != std::string::npos; pos = bare.find("das-cmop")) bare.erase(pos, 8);
    const auto dash = bare.find('-');
    try {
      if (dash != std::string::npos) {
        const int lo = parse_problem_name(bare.substr(0, dash));
        const int hi = parse_problem_name(bare.substr(dash + 1));
        if (lo > hi) throw ConfigError("empty problem range '" + item + "'");
        for (int id = lo; id <= hi; ++id) ids.push_back(id);
      } else {
        ids.push_back(parse_problem_name(bare));
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad problem list entry '" + item + "'");
    }
  }
  if (ids.empty()) throw ConfigError("empty problem list");
  return ids;
}

/// Reads one triplet per line ("eta zeta gamma", commas allowed); blank
/// lines and '#' comments are skipped.
inline std::vector<DifficultyTriplet> read_triplet_list(std::istream& in) {
  std::vector<DifficultyTriplet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::vector<double> v;
    double x = 0.0;
    while (row >> x) v.push_back(x);
    if (!row.eof()) throw ConfigError("non-numeric triplet on line " + std::to_string(lineno));
    if (v.empty()) continue;
    if (v.size() != 3) throw ConfigError("triplet on line " + std::to_string(lineno) + " needs three values");
    DifficultyTriplet t{v[0], v[1], v[2]};
    if (!t.valid()) throw ConfigError("triplet on line " + std::to_string(lineno) + " lies outside [0,1]^3");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError("triplet list is empty");
  return out;
}

/// "builtin16" or a path to a triplet file.
inline std::vector<DifficultyTriplet> load_triplets(const std::string& source) {
  if (source == "builtin16") return builtin_triplets();
  std::ifstream in(source);
  if (!in) throw ConfigError("cannot open triplet file '" + source + "'");
  return read_triplet_list(in);
}

inline std::vector<Algorithm> parse_algorithm_list(const std::string& text) {
  std::vector<Algorithm> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(parse_algorithm(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("empty algorithm list");
  return out;
}

// ---------------------------------------------------------------------------
// Reference fronts

inline std::string reference_front_filename(int problem, const DifficultyTriplet& t, std::size_t resolution) {
  return problem_name(problem) + "_eta" + format_shortest(t.eta) + "_zeta" + format_shortest(t.zeta) + "_gamma" +
         format_shortest(t.gamma) + "_res" + std::to_string(resolution) + ".txt";
}

/// Loads the cached front for (problem, triplet, resolution) or generates
/// and caches it. An empty point list means the oracle found no feasible
/// point.
inline ReferenceFront obtain_reference_front(int problem, const DifficultyTriplet& t, std::size_t resolution,
                                             const fs::path& cache_dir, bool generate) {
  const fs::path path = cache_dir / reference_front_filename(problem, t, resolution);
  if (fs::exists(path)) {
    auto front = load_reference_front(path.string());
    if (front.problem_id != problem || !(front.triplet == t) || front.resolution != resolution) {
      throw ConfigError("cached reference front '" + path.string() + "' does not match its key");
    }
    return front;
  }
  if (!generate) {
    throw ConfigError("reference front '" + path.string() + "' is missing and generation is disabled");
  }
  ReferenceFront front;
  try {
    front = generate_reference_front(make_das_cmop(problem, t), resolution);
  } catch (const EmptyFrontError&) {
    front.problem_id = problem;
    front.triplet = t;
    front.resolution = resolution;
  }
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory '" + cache_dir.string() + "': " + ec.message());
  const fs::path tmp = path.string() + ".tmp";
  save_reference_front(tmp.string(), front);
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move reference front into '" + path.string() + "': " + ec.message());
  return front;
}

// ---------------------------------------------------------------------------
// Running

inline constexpr const char* kJournalName = "records.jsonl";

/// Reads every complete record from a journal; damaged lines are skipped.
inline std::vector<RunRecord> load_journal(const fs::path& path) {
  std::vector<RunRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception&) {
      // an interrupted write leaves a truncated last line
    }
  }
  return out;
}

inline std::vector<RunRecord> load_records(const fs::path& dir) {
  const fs::path journal = dir / kJournalName;
  if (!fs::exists(journal)) throw IoError("no record journal at '" + journal.string() + "'");
  auto records = load_journal(journal);
  std::sort(records.begin(), records.end(), record_less);
  return records;
}

namespace detail {

class JournalWriter {
 public:
  explicit JournalWriter(const fs::path& path) : path_(path) {
    out_.open(path, std::ios::app);
    if (!out_) throw IoError("cannot open journal '" + path.string() + "' for writing");
  }

  void append(const RunRecord& r) {
    const std::string line = record_to_json(r).dump();
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw IoError("error writing journal '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
  std::mutex mutex_;
};

inline RunRecord execute_run(int problem, const DifficultyTriplet& t, Algorithm algo, std::size_t run,
                             std::uint64_t seed, std::size_t budget, const ReferenceFront& reference) {
  const auto inst = make_das_cmop(problem, t);
  AlgoConfig cfg = default_config(inst.num_objectives(), inst.num_variables());
  cfg.max_evaluations = std::max(budget, cfg.population_size);
  cfg.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  auto result = run_algorithm(algo, inst, cfg, reference.points);
  const auto stop = std::chrono::steady_clock::now();

  RunRecord r;
  r.problem = problem;
  r.triplet = t;
  r.algorithm = algo;
  r.run = run;
  r.seed = seed;
  r.evaluations = result.evaluations;
  r.wall_time = std::chrono::duration<double>(stop - start).count();
  r.trace = std::move(result.igd_trace);
  for (const auto& s : result.population) r.final_objectives.push_back(s.f);
  if (reference.points.empty()) {
    r.status = IgdStatus::empty_reference;
  } else {
    r.final_igd = population_igd(reference.points, result.population);
    if (!std::isfinite(r.final_igd)) {
      r.status = IgdStatus::no_feasible;
      r.final_igd = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return r;
}

}  // namespace detail

/// Runs every (problem, triplet, algorithm, run) of the spec. Finished runs
/// are appended to <out>/records.jsonl as they complete; runs already in the
/// journal with the expected seed are not repeated. Returns all records in
/// canonical order.
inline std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + spec.out_dir.string() + "': " + ec.message());

  const fs::path journal = spec.out_dir / kJournalName;
  std::map<std::tuple<int, std::string, Algorithm, std::size_t>, RunRecord> done;
  for (auto& r : load_journal(journal)) {
    done.emplace(std::make_tuple(r.problem, cell_key(r.problem, r.triplet), r.algorithm, r.run), std::move(r));
  }

  struct Task {
    int problem;
    DifficultyTriplet triplet;
    Algorithm algo;
    std::size_t run;
    std::uint64_t seed;
    const ReferenceFront* reference;
  };

  const fs::path cache = spec.effective_cache_dir();
  std::map<std::string, ReferenceFront> fronts;
  std::vector<RunRecord> records;
  std::vector<Task> pending;
  for (int problem : spec.problems) {
    for (const auto& t : spec.triplets) {
      std::vector<Task> cell_tasks;
      for (Algorithm algo : spec.algorithms) {
        for (std::size_t run = 0; run < spec.runs; ++run) {
          const std::uint64_t seed = derive_seed(spec.base_seed, problem, t, algo, run);
          const auto it = done.find(std::make_tuple(problem, cell_key(problem, t), algo, run));
          if (it != done.end() && it->second.seed == seed) {
            records.push_back(it->second);
          } else {
            cell_tasks.push_back({problem, t, algo, run, seed, nullptr});
          }
        }
      }
      if (cell_tasks.empty()) continue;
      const std::string key = cell_key(problem, t);
      if (!fronts.count(key)) {
        const std::size_t res = spec.resolution.value_or(default_resolution(problem <= 6 ? 2 : 3));
        fronts.emplace(key, obtain_reference_front(problem, t, res, cache, spec.generate_fronts));
        if (log && fronts.at(key).points.empty()) {
          *log << "warning: " << key << ": reference front is empty; IGD will be undefined\n";
        }
      }
      for (auto& task : cell_tasks) {
        task.reference = &fronts.at(key);
        pending.push_back(task);
      }
    }
  }

  // Rewrite the journal with only the complete records so appends start on
  // a fresh line.
  {
    std::vector<RunRecord> kept;
    for (const auto& [key, r] : done) kept.push_back(r);
    std::sort(kept.begin(), kept.end(), record_less);
    const fs::path tmp = journal.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw IoError("cannot write journal '" + tmp.string() + "'");
      for (const auto& r : kept) out << record_to_json(r).dump() << '\n';
    }
    fs::rename(tmp, journal, ec);
    if (ec) throw IoError("cannot replace journal '" + journal.string() + "': " + ec.message());
  }

  detail::JournalWriter writer(journal);
  std::vector<RunRecord> fresh(pending.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::mutex log_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const Task& task = pending[i];
      try {
        fresh[i] = detail::execute_run(task.problem, task.triplet, task.algo, task.run, task.seed,
                                       spec.budget_for(task.problem), *task.reference);
        writer.append(fresh[i]);
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << cell_key(task.problem, task.triplet) << " " << algorithm_name(task.algo) << " run " << task.run
               << " igd " << format_sci(fresh[i].final_igd) << '\n';
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(spec.workers, 1, std::max<std::size_t>(pending.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& r : fresh) records.push_back(std::move(r));
  std::sort(records.begin(), records.end(), record_less);
  return records;
}

// ---------------------------------------------------------------------------
// Statistics

enum class Marker { none, better, worse };

inline std::string marker_name(Marker m) {
  switch (m) {
    case Marker::better: return "better";
    case Marker::worse: return "worse";
    case Marker::none: return "none";
  }
  return "none";
}

struct RankSumResult {
  double p_value = 1.0;
  Marker marker = Marker::none;
};

namespace detail {

// Mid-ranks (1-based) of the pooled sample a ++ b.
inline std::vector<double> pooled_midranks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> idx(pooled.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

/// Two-sided Wilcoxon rank-sum test, normal approximation with tie and
/// continuity corrections. The marker reads from `a`'s side for smaller-is-
/// better data: `better` when a ranks significantly lower than b.
inline RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha = 0.05) {
  if (a.empty() || b.empty()) throw ContractError("wilcoxon_rank_sum: both samples must be nonempty");
  const auto ranks = detail::pooled_midranks(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double total = n1 + n2;
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w += ranks[i];

  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }
  const double mean = n1 * (total + 1.0) / 2.0;
  const double variance = n1 * n2 / 12.0 * ((total + 1.0) - tie_sum / (total * (total - 1.0)));
  RankSumResult result;
  if (!(variance > 0.0)) return result;
  const double diff = w - mean;
  const double corrected = std::max(std::abs(diff) - 0.5, 0.0);
  const double z = corrected / std::sqrt(variance);
  result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  if (result.p_value < alpha && diff != 0.0) result.marker = diff < 0.0 ? Marker::better : Marker::worse;
  return result;
}

/// Exact two-sided rank-sum p-value by enumerating every assignment of the
/// pooled mid-ranks to the first sample. Limited to 20 pooled values.
inline double wilcoxon_rank_sum_exact_p(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ContractError("wilcoxon_rank_sum_exact_p: both samples must be nonempty");
  const std::size_t total = a.size() + b.size();
  if (total > 20) throw ContractError("wilcoxon_rank_sum_exact_p: at most 20 pooled observations");
  const auto ranks = detail::pooled_midranks(a, b);
  const std::size_t n1 = a.size();
  double w_obs = 0.0;
  for (std::size_t i = 0; i < n1; ++i) w_obs += ranks[i];
  const double mean = static_cast<double>(n1) * (static_cast<double>(total) + 1.0) / 2.0;
  const double observed = std::abs(w_obs - mean);

  std::size_t extreme = 0;
  std::size_t count = 0;
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
    double w = 0.0;
    for (std::size_t i = 0; i < total; ++i)
      if (mask & (1u << i)) w += ranks[i];
    ++count;
    if (std::abs(w - mean) >= observed - 1e-9) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(count);
}

struct CellStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and sample standard deviation (n-1 divisor, 0 for one value). The
/// values are summed in sorted order so the result does not depend on
/// input order.
inline CellStats describe(std::vector<double> values) {
  CellStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct StatsRow {
  int problem = 0;
  DifficultyTriplet triplet;
  std::map<Algorithm, CellStats> cells;
  /// NSGA-II-CDP relative to MOEA/D-CDP, present when both have the same
  /// number of finite IGD values.
  std::optional<RankSumResult> comparison;
};

struct StatsTable {
  double alpha = 0.05;
  std::vector<StatsRow> rows;
  std::vector<std::string> warnings;
};

inline StatsTable summarize(std::span<const RunRecord> records, double alpha = 0.05) {
  StatsTable table;
  table.alpha = alpha;
  using CellId = std::pair<int, DifficultyTriplet>;
  auto cell_less = [](const CellId& x, const CellId& y) {
    if (x.first != y.first) return x.first < y.first;
    return triplet_less(x.second, y.second);
  };
  std::map<CellId, std::map<Algorithm, std::vector<double>>, decltype(cell_less)> grouped(cell_less);
  std::map<CellId, std::map<Algorithm, std::size_t>, decltype(cell_less)> dropped(cell_less);
  for (const auto& r : records) {
    const CellId id{r.problem, r.triplet};
    auto& values = grouped[id][r.algorithm];
    if (std::isfinite(r.final_igd)) {
      values.push_back(r.final_igd);
    } else {
      ++dropped[id][r.algorithm];
    }
  }
  for (const auto& [id, per_algo] : grouped) {
    StatsRow row;
    row.problem = id.first;
    row.triplet = id.second;
    for (const auto& [algo, values] : per_algo) {
      const auto drop_it = dropped.find(id);
      const std::size_t lost = drop_it != dropped.end() && drop_it->second.count(algo) ? drop_it->second.at(algo) : 0;
      const std::string where = cell_key(id.first, id.second) + " " + algorithm_name(algo);
      if (values.empty()) {
        table.warnings.push_back(where + ": no finite IGD values, cell omitted");
        continue;
      }
      if (lost > 0) table.warnings.push_back(where + ": " + std::to_string(lost) + " run(s) without finite IGD ignored");
      row.cells[algo] = describe(values);
    }
    const auto moead = per_algo.find(Algorithm::moead_cdp);
    const auto nsga = per_algo.find(Algorithm::nsga2_cdp);
    if (row.cells.count(Algorithm::moead_cdp) && row.cells.count(Algorithm::nsga2_cdp) &&
        moead->second.size() == nsga->second.size()) {
      row.comparison = wilcoxon_rank_sum(nsga->second, moead->second, alpha);
    }
    if (!row.cells.empty()) table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Output

enum class TableFormat { csv, md };

inline TableFormat parse_table_format(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "md") return TableFormat::md;
  throw ConfigError("unknown format '" + s + "' (expected csv or md)");
}

inline std::string triplet_text(const DifficultyTriplet& t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.2g,%.2g,%.2g)", t.eta, t.zeta, t.gamma);
  return buf;
}

inline void write_stats(std::ostream& out, const StatsTable& table, TableFormat format) {
  auto comparison_cells = [](const StatsRow& row, Algorithm algo) -> std::pair<std::string, std::string> {
    if (algo != Algorithm::nsga2_cdp || !row.comparison) return {"", ""};
    return {format_sci(row.comparison->p_value), marker_name(row.comparison->marker)};
  };
  if (format == TableFormat::csv) {
    out << "problem,eta,zeta,gamma,algorithm,runs,mean_igd,std_igd,p_value,marker\n";
    for (const auto& row : table.rows) {
      for (const auto& [algo, cell] : row.cells) {
        const auto [p, marker] = comparison_cells(row, algo);
        out << problem_name(row.problem) << ',' << format_shortest(row.triplet.eta) << ','
            << format_shortest(row.triplet.zeta) << ',' << format_shortest(row.triplet.gamma) << ','
            << algorithm_name(algo) << ',' << cell.count << ',' << format_sci(cell.mean) << ','
            << format_sci(cell.stddev) << ',' << p << ',' << marker << '\n';
      }
    }
    return;
  }
  out << "| Problem | Difficulty Triplet | Algorithm | Runs | Mean IGD | Std IGD | p-value | Marker |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : table.rows) {
    for (const auto& [algo, cell] : row.cells) {
      const auto [p, marker] = comparison_cells(row, algo);
      out << "| " << problem_name(row.problem) << " | " << triplet_text(row.triplet) << " | "
          << algorithm_label(algo) << " | " << cell.count << " | " << format_sci(cell.mean) << " | "
          << format_sci(cell.stddev) << " | " << p << " | " << marker << " |\n";
    }
  }
}

/// Result-table layout: per problem, one mean line and one standard
/// deviation line per triplet. The lower mean is bold; a dagger marks
/// NSGA-II-CDP significantly worse than MOEA/D-CDP, a double dagger
/// significantly better.
inline void write_dagger_table(std::ostream& out, const StatsTable& table) {
  std::vector<int> problems;
  for (const auto& row : table.rows)
    if (std::find(problems.begin(), problems.end(), row.problem) == problems.end()) problems.push_back(row.problem);
  for (int problem : problems) {
    out << "### " << "DAS-CMOP" << problem << "\n\n";
    out << "| Difficulty Triplet | MOEA/D-CDP | NSGA-II-CDP |\n|---|---|---|\n";
    for (const auto& row : table.rows) {
      if (row.problem != problem) continue;
      const auto* moead = row.cells.count(Algorithm::moead_cdp) ? &row.cells.at(Algorithm::moead_cdp) : nullptr;
      const auto* nsga = row.cells.count(Algorithm::nsga2_cdp) ? &row.cells.at(Algorithm::nsga2_cdp) : nullptr;
      std::string mean_m = moead ? format_sci(moead->mean) : "-";
      std::string mean_n = nsga ? format_sci(nsga->mean) : "-";
      if (moead && nsga) {
        if (moead->mean < nsga->mean) mean_m = "**" + mean_m + "**";
        if (nsga->mean < moead->mean) mean_n = "**" + mean_n + "**";
      }
      if (row.comparison && row.comparison->marker == Marker::worse) mean_n += " †";
      if (row.comparison && row.comparison->marker == Marker::better) mean_n += " ‡";
      out << "| " << triplet_text(row.triplet) << " | " << mean_m << " | " << mean_n << " |\n";
      out << "| | " << (moead ? format_sci(moead->stddev) : "-") << " | " << (nsga ? format_sci(nsga->stddev) : "-")
          << " |\n";
    }
    out << '\n';
  }
}

/// Run with the lowest finite IGD per (problem, triplet, algorithm); ties go
/// to the lowest seed.
inline std::vector<const RunRecord*> best_runs(std::span<const RunRecord> records) {
  std::map<std::string, const RunRecord*> best;
  for (const auto& r : records) {
    if (!std::isfinite(r.final_igd)) continue;
    const std::string key = cell_key(r.problem, r.triplet) + "|" + algorithm_name(r.algorithm);
    auto& slot = best[key];
    if (!slot || r.final_igd < slot->final_igd || (r.final_igd == slot->final_igd && r.seed < slot->seed)) slot = &r;
  }
  std::vector<const RunRecord*> out;
  for (const auto& [key, r] : best) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const RunRecord* a, const RunRecord* b) { return record_less(*a, *b); });
  return out;
}

namespace detail {

inline std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

/// Writes results.csv (one line per run), traces.csv, stats.<csv|md> and
/// fronts/<cell>_<algorithm>.dat holding the best run's final objectives.
inline void emit_outputs(const StatsTable& table, std::span<const RunRecord> records, const fs::path& dir,
                         TableFormat format) {
  std::error_code ec;
  fs::create_directories(dir / "fronts", ec);
  if (ec) throw IoError("cannot create output directory '" + (dir / "fronts").string() + "': " + ec.message());

  std::vector<RunRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), record_less);
  {
    auto out = detail::open_output(dir / "results.csv");
    out << "problem,eta,zeta,gamma,algorithm,run,seed,final_igd,igd_status,evaluations,wall_time\n";
    for (const auto& r : sorted) {
      out << problem_name(r.problem) << ',' << format_shortest(r.triplet.eta) << ','
          << format_shortest(r.triplet.zeta) << ',' << format_shortest(r.triplet.gamma) << ','
          << algorithm_name(r.algorithm) << ',' << r.run << ',' << r.seed << ','
          << (std::isfinite(r.final_igd) ? format_shortest(r.final_igd) : "nan") << ',' << igd_status_name(r.status)
          << ',' << r.evaluations << ',' << format_shortest(r.wall_time) << '\n';
    }
  }
  {
    auto out = detail::open_output(dir / "traces.csv");
    out << "problem,eta,zeta,gamma,algorithm,run,evaluations,igd\n";
    for (const auto& r : sorted) {
      for (const auto& t : r.trace) {
        out << problem_name(r.problem) << ',' << format_shortest(r.triplet.eta) << ','
            << format_shortest(r.triplet.zeta) << ',' << format_shortest(r.triplet.gamma) << ','
            << algorithm_name(r.algorithm) << ',' << r.run << ',' << t.evaluations << ','
            << (std::isfinite(t.igd) ? format_shortest(t.igd) : "nan") << '\n';
      }
    }
  }
  {
    auto out = detail::open_output(dir / (format == TableFormat::csv ? "stats.csv" : "stats.md"));
    write_stats(out, table, format);
  }
  for (const RunRecord* r : best_runs(sorted)) {
    const std::string name = problem_name(r->problem) + "_eta" + format_shortest(r->triplet.eta) + "_zeta" +
                             format_shortest(r->triplet.zeta) + "_gamma" + format_shortest(r->triplet.gamma) + "_" +
                             algorithm_name(r->algorithm) + ".dat";
    auto out = detail::open_output(dir / "fronts" / name);
    out << "# " << problem_name(r->problem) << " eta=" << format_shortest(r->triplet.eta)
        << " zeta=" << format_shortest(r->triplet.zeta) << " gamma=" << format_shortest(r->triplet.gamma)
        << " algorithm=" << algorithm_name(r->algorithm) << " seed=" << r->seed
        << " igd=" << format_shortest(r->final_igd) << '\n';
    for (const auto& f : r->final_objectives) {
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? " " : "") << format_shortest(f[i]);
      out << '\n';
    }
  }
}

}  // namespace dascmop
