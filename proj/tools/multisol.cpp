#include "multisol/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace multisol;

namespace {

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected name=value, got '" + item + "'");
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

void print_summary(const RunResult& r, std::ostream& os) {
  os << r.spec.id << " N=" << r.degree << ": " << r.rows.size() << " solution(s)";
  for (const auto& row : r.rows) os << " " << row.label << "(n_it=" << row.iterations << ")";
  os << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple solutions of nonlinear boundary-value problems by spectral Galerkin discretization, "
               "trust-region least squares and deflation"};
  app.require_subcommand(1);

  RunConfig config;
  std::string hessian = "gn";
  std::string strategy = "same_guess";
  std::string initial_radius = "iterate_scale";
  std::string subset;
  std::vector<std::string> params;
  std::string sweep;
  std::string emit = "coeffs,grid,trace,report";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int degree = 0;
  int reference = 0;

  auto* solve = app.add_subcommand("solve", "find multiple solutions of one problem");
  solve->add_option("--problem", config.problem, "catalog id or TOML problem config")->required();
  solve->add_option("--n", degree, "polynomial degree N (default: problem's)");
  solve->add_option("--budget", config.plan.budget, "deflation rounds");
  solve->add_option("--strategy", strategy, "same_guess | perturb_last | ledger_subset");
  solve->add_option("--subset", subset, "comma-separated ledger labels to deflate (ledger_subset)");
  solve->add_flag("--perturb-subset", config.plan.perturb_subset, "start ledger_subset rounds near the last subset root");
  solve->add_option("--ledger", config.ledger_path, "ledger.json of known roots to start from");
  solve->add_option("--seed", config.plan.seed, "seed for random perturbations");
  solve->add_option("--perturbation", config.plan.perturbation, "relative perturbation amplitude");
  solve->add_option("--shift", config.plan.shift, "deflation shift");
  solve->add_option("--hessian", hessian, "gn | full");
  solve->add_option("--max-iterations", config.solver.max_iterations, "trust-region iterations per round");
  solve->add_option("--initial-radius", initial_radius, "gradient_norm | iterate_scale | fixed");
  solve->add_option("--radius", config.solver.radius, "first radius for --initial-radius fixed");
  solve->add_option("--guess", config.guess, "initial guess, e.g. ones, 0.1*ones, -cos(ones)");
  solve->add_option("--param", params, "parameter override name=value (repeatable)");
  solve->add_option("--reference", reference, "degree of a reference run for self-convergence errors");
  solve->add_option("--points", config.grid_points, "grid points per axis of the output samples");
  solve->add_option("--emit", emit, "comma-separated outputs: coeffs,grid,trace,report");
  solve->add_option("--sweep", sweep, "name=v1,v2,... runs one solve per parameter value");
  solve->add_option("--threads", threads, "worker threads for --sweep");
  solve->add_option("--out", config.out_dir, "output directory");

  std::string dir_a, dir_b;
  bool strict = false;
  auto* compare = app.add_subcommand("compare", "match solutions of two runs and report grid differences");
  compare->add_option("--a", dir_a, "run directory")->required();
  compare->add_option("--b", dir_b, "run directory, typically at higher N")->required();
  compare->add_flag("--strict", strict, "fail when any solution is unpaired");

  std::string template_id;
  auto* cat = app.add_subcommand("catalog", "list the catalog problems");
  cat->add_option("--toml", template_id, "print the TOML template of one problem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*cat) {
      if (!template_id.empty()) {
        std::cout << to_toml(lookup(template_id));
        return 0;
      }
      for (const auto& s : catalog()) {
        std::cout << s.id << "  (N=" << s.default_degree << ", guess " << s.initial_guess << ")  " << s.equation;
        if (!s.parameters.empty()) {
          std::cout << "  [";
          bool first = true;
          for (const auto& [k, v] : s.parameters) {
            std::cout << (first ? "" : ", ") << k << "=" << v;
            first = false;
          }
          std::cout << "]";
        }
        std::cout << "\n";
      }
      return 0;
    }

    if (*compare) {
      const Comparison c = compare_runs(dir_a, dir_b);
      std::cout << comparison_markdown(c);
      return strict && (!c.unpaired_a.empty() || !c.unpaired_b.empty()) ? 1 : 0;
    }

    if (config.problem.ends_with(".toml")) {
      std::ifstream in(config.problem);
      if (!in) throw std::runtime_error("cannot open problem config '" + config.problem + "'");
      std::ostringstream text;
      text << in.rdbuf();
      apply_run_settings(run_settings_from_toml(text.str()), config);
    }
    if (degree) config.degree = degree;
    if (reference) config.reference_degree = reference;
    if (solve->count("--strategy") || !config.problem.ends_with(".toml")) config.plan.strategy = parse_strategy(strategy);
    if (!subset.empty()) {
      config.plan.subset.clear();
      std::stringstream in(subset);
      for (std::string item; std::getline(in, item, ',');) config.plan.subset.push_back(item);
    }
    if (solve->count("--hessian")) {
      if (hessian == "gn") config.solver.hessian = HessianMode::gauss_newton;
      else if (hessian == "full") config.solver.hessian = HessianMode::full;
      else throw std::invalid_argument("--hessian must be gn or full");
    }
    if (solve->count("--initial-radius")) config.solver.initial_radius = parse_initial_radius(initial_radius);
    for (const auto& [k, v] : parse_assignments(params)) config.parameters[k] = v;
    config.emit = {false, false, false, false};
    std::stringstream emits(emit);
    for (std::string item; std::getline(emits, item, ',');) {
      if (item == "coeffs") config.emit.coefficients = true;
      else if (item == "grid") config.emit.grid = true;
      else if (item == "trace") config.emit.trace = true;
      else if (item == "report") config.emit.report = true;
      else throw std::invalid_argument("unknown --emit item '" + item + "'");
    }

    if (!sweep.empty()) {
      const auto eq = sweep.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--sweep expects name=v1,v2,...");
      std::vector<double> values;
      std::stringstream in(sweep.substr(eq + 1));
      for (std::string item; std::getline(in, item, ',');) values.push_back(std::stod(item));
      const auto results = run_sweep(config, sweep.substr(0, eq), values, threads);
      bool any = false;
      for (const auto& r : results) {
        print_summary(r, std::cout);
        any = any || r.any_converged();
      }
      return any ? 0 : 1;
    }

    const RunResult r = run(config);
    write_outputs(r, config);
    std::cout << report_markdown(r);
    return r.any_converged() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "multisol: " << e.what() << "\n";
    return 2;
  }
}
