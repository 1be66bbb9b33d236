// Copyright 2026 The kspoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kspoa/equilibrium_oracle.hpp"
#include "kspoa/game_json.hpp"
#include "kspoa/poa_lp.hpp"
#include "kspoa/sampling.hpp"
#include "kspoa/worst_case_gen.hpp"

namespace kspoa {
namespace {

constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  unsigned long long seed = 0;
  int jobs = 1;
  bool use_float = false;
  double tol = 1e-9;
};

struct IntRange {
  int lo = 0;
  int hi = 0;      // inclusive
  bool to_n = false;  // upper bound written as "n"
};

// "3", "2..10" or (where allowed) "1..n".
IntRange parse_range(const std::string& text, bool allow_n) {
  IntRange range;
  const auto dots = text.find("..");
  auto parse_int = [&](const std::string& part) {
    std::size_t used = 0;
    const int v = std::stoi(part, &used);
    if (used != part.size()) throw std::invalid_argument("bad range literal: " + text);
    return v;
  };
  if (dots == std::string::npos) {
    range.lo = range.hi = parse_int(text);
  } else {
    range.lo = parse_int(text.substr(0, dots));
    const std::string upper = text.substr(dots + 2);
    if (upper == "n" && allow_n) {
      range.to_n = true;
    } else {
      range.hi = parse_int(upper);
    }
  }
  if (!range.to_n && range.hi < range.lo) {
    throw std::invalid_argument("empty range: " + text);
  }
  return range;
}

template <typename T>
nlohmann::json value_json(const T& v) {
  nlohmann::json out;
  if constexpr (std::is_same_v<T, Rational>) {
    out["exact"] = format_rational(v);
    out["decimal"] = to_decimal(v);
  } else {
    out["decimal"] = to_decimal(v);
  }
  return out;
}

template <typename T>
nlohmann::json extended_json(const Extended<T>& e) {
  if (e.infinite) return "inf";
  return value_json(e.value);
}

template <typename T>
nlohmann::json bound_report_json(const BoundReport<T>& report) {
  nlohmann::json out;
  out["class"] = report.class_name;
  out["n"] = report.n;
  out["k"] = report.k;
  out["exact_mode"] = report.exact_mode;
  out["upper"] = extended_json(report.upper);
  out["lower"] = extended_json(report.lower);
  out["zeta_star"] = report.zeta_star;
  if (report.c_star) out["c_star"] = *report.c_star;
  else out["c_star"] = nullptr;
  nlohmann::json per_zeta = nlohmann::json::array();
  for (const auto& pr : report.p_results) {
    nlohmann::json entry;
    entry["zeta"] = pr.zeta;
    entry["rho"] = value_json(pr.rho);
    entry["nu"] = value_json(pr.nu);
    entry["certificate"]["computed"] = pr.certificate.computed;
    entry["certificate"]["valid"] = pr.certificate.valid;
    if (pr.certificate.computed) {
      entry["certificate"]["lambda"] = value_json(pr.certificate.lambda);
      entry["certificate"]["mu"] = value_json(pr.certificate.mu);
    }
    per_zeta.push_back(std::move(entry));
  }
  out["upper_programs"] = std::move(per_zeta);
  nlohmann::json per_c = nlohmann::json::array();
  for (const auto& qr : report.q_results) {
    nlohmann::json entry;
    entry["c_index"] = qr.c_index;
    entry["solved"] = qr.status == LpStatus::kOptimal;
    if (qr.status == LpStatus::kOptimal) entry["value"] = value_json(qr.value);
    per_c.push_back(std::move(entry));
  }
  out["lower_programs"] = std::move(per_c);
  return out;
}

template <typename T>
void dump_programs(int n, int k, const LatencyBasis& basis, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (int zeta = 1; zeta <= k; ++zeta) {
    std::ofstream out(dir + "/P_zeta" + std::to_string(zeta) + ".lp");
    dump_lp(build_P<T>(n, zeta, basis), out);
  }
  for (std::size_t j = 0; j < basis.size(); ++j) {
    std::ofstream out(dir + "/Q_c" + std::to_string(j) + ".lp");
    dump_lp(build_Q<T>(n, k, basis.local_cost(j)), out);
  }
}

template <typename T>
Compare<T> make_compare(const GlobalOptions& opts) {
  Compare<T> cmp;
  if constexpr (std::is_same_v<T, double>) cmp.tol = opts.tol;
  return cmp;
}

template <typename T>
int run_bounds(const GlobalOptions& opts, const std::string& class_spec, int n, int k,
               const std::string& dump_dir) {
  const LatencyBasis basis = parse_basis(class_spec);
  if (!dump_dir.empty()) dump_programs<T>(n, k, basis, dump_dir);
  const auto report = spoa_bounds<T>(n, k, basis, make_compare<T>(opts));
  std::cout << bound_report_json(report).dump(2) << "\n";
  return 0;
}

// One CSV row: class,n,k,upper,lower,zeta_star,c_star,exact_mode.
template <typename T>
std::string csv_row(const BoundReport<T>& report) {
  auto bound = [](const Extended<T>& e) { return extended_to_string(e); };
  std::string row = report.class_name + "," + std::to_string(report.n) + "," +
                    std::to_string(report.k) + "," + bound(report.upper) + "," +
                    bound(report.lower) + "," + std::to_string(report.zeta_star) + ",";
  if (report.c_star) row += std::to_string(*report.c_star);
  row += report.exact_mode ? ",true" : ",false";
  return row;
}

template <typename T>
int run_sweep(const GlobalOptions& opts, std::vector<std::string> classes,
              const std::string& n_text, const std::string& k_text,
              const std::string& out_path) {
  const IntRange n_range = parse_range(n_text, false);
  const IntRange k_range = parse_range(k_text, true);
  if (n_range.lo < 1) throw std::invalid_argument("n must be at least 1");
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  struct Instance {
    std::string class_spec;
    int n = 0;
    int k = 0;
  };
  std::vector<Instance> grid;
  for (const std::string& class_spec : classes) {
    parse_basis(class_spec);  // fail fast on typos
    for (int n = n_range.lo; n <= n_range.hi; ++n) {
      int k_hi = k_range.to_n ? n : k_range.hi;
      int k_lo = k_range.lo;
      if (k_lo < 1 || k_hi > n) {
        std::cerr << "warning: k range clamped to 1.." << n << " at n = " << n << "\n";
        k_lo = std::max(k_lo, 1);
        k_hi = std::min(k_hi, n);
      }
      for (int k = k_lo; k <= k_hi; ++k) grid.push_back({class_spec, n, k});
    }
  }
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");

  std::vector<std::string> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  const Compare<T> cmp = make_compare<T>(opts);
  auto work = [&](int t, int nthreads) {
    for (std::size_t i = static_cast<std::size_t>(t); i < grid.size();
         i += static_cast<std::size_t>(nthreads)) {
      try {
        const LatencyBasis basis = parse_basis(grid[i].class_spec);
        rows[i] = csv_row(spoa_bounds<T>(grid[i].n, grid[i].k, basis, cmp));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(opts.jobs, static_cast<int>(grid.size())));
  if (nthreads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t, nthreads);
    for (std::thread& th : pool) th.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  *out << "class,n,k,upper,lower,zeta_star,c_star,exact_mode\n";
  for (const std::string& row : rows) *out << row << "\n";
  return 0;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  return nlohmann::json::parse(in);
}

template <typename T>
nlohmann::json witness_json(const DeviationWitness<T>& witness) {
  nlohmann::json out;
  out["group"] = witness.group;
  out["replacement"] = witness.replacement;
  out["deviated_cost"] = value_json(witness.deviated_cost);
  return out;
}

template <typename T>
int run_oracle(const GlobalOptions& opts, const nlohmann::json& game_json, int k) {
  const auto game = game_from_json<T>(game_json);
  const auto report =
      enumerate_k_strong(game, k, make_compare<T>(opts), {}, {}, opts.jobs);
  nlohmann::json out;
  out["k"] = k;
  out["equilibrium_count"] = report.equilibria.size();
  nlohmann::json equilibria = nlohmann::json::array();
  for (const JointStrategy& s : report.equilibria) {
    equilibria.push_back(joint_strategy_to_json(s));
  }
  out["equilibria"] = std::move(equilibria);
  out["worst_cost"] = value_json(report.worst_cost);
  out["optimal_cost"] = value_json(report.optimal_cost);
  out["exact_spoa"] = extended_json(report.exact_spoa);
  out["spoa_by_convention"] = report.spoa_by_convention;
  std::cout << out.dump(2) << "\n";
  return 0;
}

template <typename T>
int run_verify(const GlobalOptions& opts, const nlohmann::json& game_json,
               const nlohmann::json& strategy_json, int k) {
  const auto game = game_from_json<T>(game_json);
  const JointStrategy s = joint_strategy_from_json(strategy_json);
  const auto check = is_k_strong(game, s, k, make_compare<T>(opts));
  nlohmann::json out;
  out["k"] = k;
  out["is_equilibrium"] = check.is_equilibrium;
  out["cost"] = value_json(check.cost);
  if (check.witness) out["witness"] = witness_json(*check.witness);
  std::cout << out.dump(2) << "\n";
  return 0;
}

template <typename T>
int run_dynamics(const GlobalOptions& opts, const nlohmann::json& game_json, int k,
                 const std::string& start_path) {
  const auto game = game_from_json<T>(game_json);
  JointStrategy start;
  if (!start_path.empty()) {
    start = joint_strategy_from_json(load_json_file(start_path));
  } else {
    std::mt19937_64 rng(opts.seed);
    start = sample_joint_strategy(game, rng);
  }
  std::vector<DynamicsStep<T>> log;
  const JointStrategy end =
      group_best_response_dynamics(game, k, start, make_compare<T>(opts), &log);
  nlohmann::json out;
  out["k"] = k;
  out["start"] = joint_strategy_to_json(start);
  out["terminal"] = joint_strategy_to_json(end);
  out["terminal_cost"] = value_json(system_cost(game, end));
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : log) {
    nlohmann::json entry;
    entry["group"] = step.group;
    entry["replacement"] = step.replacement;
    entry["cost_after"] = value_json(step.cost_after);
    steps.push_back(std::move(entry));
  }
  out["steps"] = std::move(steps);
  std::cout << out.dump(2) << "\n";
  return 0;
}

template <typename T>
nlohmann::json theta_json(const ThetaVector<T>& theta) {
  nlohmann::json values = nlohmann::json::array();
  for (const T& v : theta.values) values.push_back(coefficient_to_json(v));
  return values;
}

template <typename T>
ThetaVector<T> theta_from_json(int n, const nlohmann::json& values) {
  ThetaVector<T> theta(n, 1);
  if (!values.is_array() || values.size() != theta.values.size()) {
    throw std::invalid_argument("theta must be an array with one entry per label");
  }
  for (std::size_t i = 0; i < theta.values.size(); ++i) {
    theta.values[i] = coefficient_from_json<T>(values[i]);
  }
  return theta;
}

template <typename T>
int run_construct(const GlobalOptions& opts, const std::string& class_fn, int n, int k,
                  const std::string& theta_spec, const std::string& out_path,
                  const std::string& sidecar_path, int n_cap) {
  const LatencyBasis parsed = parse_basis(class_fn);
  if (parsed.size() != 1) {
    throw std::invalid_argument("--class-fn must name a single local cost, e.g. poly-style "
                                "\"table:[...]\" or a one-element basis");
  }
  const LocalCost cost_fn = parsed.local_cost(0);
  const Compare<T> cmp = make_compare<T>(opts);

  ThetaVector<T> theta;
  if (theta_spec == "from-lp") {
    const auto sol = solve(build_Q<T>(n, k, cost_fn), cmp);
    if (sol.status != LpStatus::kOptimal) {
      throw std::runtime_error("lower-bound program did not solve; no theta available");
    }
    theta = ThetaVector<T>(n, 1);
    for (std::size_t i = 0; i < sol.point.size(); ++i) {
      theta.at(static_cast<int>(i)) = sol.point[i];
    }
  } else {
    theta = theta_from_json<T>(n, load_json_file(theta_spec));
  }

  const std::uint64_t resource_count = ring_resource_count(n, theta);
  std::cerr << "building " << resource_count << " resources (approx. "
            << resource_count * (sizeof(T) + 2 * sizeof(int)) / 1024 << " KiB)\n";
  const RingGame<T> ring = construct(n, theta, cost_fn, n_cap);
  const auto report = verify_construction(ring, k, cmp);

  nlohmann::json sidecar;
  sidecar["kne"] = joint_strategy_to_json(ring.kne);
  sidecar["opt"] = joint_strategy_to_json(ring.opt);
  sidecar["theta"] = theta_json(theta);
  sidecar["k"] = k;
  sidecar["verified"] = report.ok();
  sidecar["realized_ratio"] = extended_json(report.realized_ratio);
  sidecar["failures"] = report.failures;

  if (out_path.empty() || out_path == "-") {
    std::cout << game_to_json(ring.game).dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << game_to_json(ring.game).dump(2) << "\n";
  }
  if (!sidecar_path.empty()) {
    std::ofstream out(sidecar_path);
    if (!out) throw std::runtime_error("cannot write " + sidecar_path);
    out << sidecar.dump(2) << "\n";
  } else {
    std::cout << sidecar.dump(2) << "\n";
  }
  return report.ok() ? 0 : kExitSolver;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"k-strong price of anarchy bounds for altruistic congestion games"};
  app.require_subcommand(1);
  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "seed for all sampled randomness");
  app.add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--float", opts.use_float, "floating-point arithmetic instead of exact");
  app.add_option("--tol", opts.tol, "comparison tolerance in float mode");

  std::string class_spec = "affine";
  std::string n_text = "2", k_text = "1";
  std::string dump_dir, out_path, sidecar_path, game_path, strategy_path, start_path;
  std::string theta_spec = "from-lp";
  std::vector<std::string> classes;
  int k_value = 1, n_value = 2, n_cap = 6;

  CLI::App* bounds = app.add_subcommand("bounds", "bound pair for one (class, n, k)");
  bounds->add_option("--class", class_spec, "basis spec")->required();
  bounds->add_option("--n", n_value, "number of players")->required();
  bounds->add_option("--k", k_value, "coalition size")->required();
  bounds->add_option("--dump-lp", dump_dir, "write the LP instances to this directory");

  CLI::App* sweep = app.add_subcommand("sweep", "CSV bound grid over (class, n, k)");
  sweep->add_option("--class", classes, "basis specs")->required();
  sweep->add_option("--n", n_text, "n or range a..b")->required();
  sweep->add_option("--k", k_text, "k, range a..b, or a..n")->required();
  sweep->add_option("--out", out_path, "CSV path (default stdout)");

  CLI::App* oracle = app.add_subcommand("oracle", "enumerate k-strong equilibria");
  oracle->add_option("--game", game_path, "game JSON file")->required();
  oracle->add_option("--k", k_value, "coalition size")->required();

  CLI::App* verify = app.add_subcommand("verify", "check one profile for k-strength");
  verify->add_option("--game", game_path, "game JSON file")->required();
  verify->add_option("--strategy", strategy_path, "joint strategy JSON file")->required();
  verify->add_option("--k", k_value, "coalition size")->required();

  CLI::App* construct_cmd =
      app.add_subcommand("construct", "materialize the ring lower-bound instance");
  construct_cmd->add_option("--class-fn", class_spec, "single-element basis spec")->required();
  construct_cmd->add_option("--n", n_value, "number of players")->required();
  construct_cmd->add_option("--k", k_value, "coalition size")->required();
  construct_cmd->add_option("--theta", theta_spec, "\"from-lp\" or a theta JSON file");
  construct_cmd->add_option("--out", out_path, "game JSON path (default stdout)");
  construct_cmd->add_option("--sidecar", sidecar_path, "sidecar JSON path");
  construct_cmd->add_option("--n-cap", n_cap, "override the n! size cap");

  CLI::App* dynamics = app.add_subcommand("dynamics", "run group best-response dynamics");
  dynamics->add_option("--game", game_path, "game JSON file")->required();
  dynamics->add_option("--k", k_value, "coalition size")->required();
  dynamics->add_option("--start", start_path, "starting joint strategy JSON file");

  // Let global flags appear after the subcommand as well.
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (bounds->parsed()) {
    return opts.use_float || !parse_basis(class_spec).exact()
               ? run_bounds<double>(opts, class_spec, n_value, k_value, dump_dir)
               : run_bounds<Rational>(opts, class_spec, n_value, k_value, dump_dir);
  }
  if (sweep->parsed()) {
    bool exact = !opts.use_float;
    for (const std::string& spec : classes) exact = exact && parse_basis(spec).exact();
    return exact ? run_sweep<Rational>(opts, classes, n_text, k_text, out_path)
                 : run_sweep<double>(opts, classes, n_text, k_text, out_path);
  }
  if (construct_cmd->parsed()) {
    return opts.use_float || !parse_basis(class_spec).exact()
               ? run_construct<double>(opts, class_spec, n_value, k_value, theta_spec,
                                       out_path, sidecar_path, n_cap)
               : run_construct<Rational>(opts, class_spec, n_value, k_value, theta_spec,
                                         out_path, sidecar_path, n_cap);
  }

  const nlohmann::json game_json = load_json_file(game_path);
  const bool exact = !opts.use_float && game_json_is_exact(game_json);
  if (oracle->parsed()) {
    return exact ? run_oracle<Rational>(opts, game_json, k_value)
                 : run_oracle<double>(opts, game_json, k_value);
  }
  if (verify->parsed()) {
    const nlohmann::json strategy_json = load_json_file(strategy_path);
    return exact ? run_verify<Rational>(opts, game_json, strategy_json, k_value)
                 : run_verify<double>(opts, game_json, strategy_json, k_value);
  }
  const std::string dynamics_start = dynamics->parsed() ? start_path : "";
  return exact ? run_dynamics<Rational>(opts, game_json, k_value, dynamics_start)
               : run_dynamics<double>(opts, game_json, k_value, dynamics_start);
}

}  // namespace
}  // namespace kspoa

int main(int argc, char** argv) {
  try {
    return kspoa::dispatch(argc, argv);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kspoa::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kspoa::kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kspoa::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kspoa::kExitSolver;
  }
}
