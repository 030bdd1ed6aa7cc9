#include "multisol/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace multisol {

namespace fs = std::filesystem;

void RunConfig::validate(const ProblemSpec& spec) const {
  const int n = degree.value_or(spec.default_degree);
  if (n < 4 || n > 64) throw std::invalid_argument("degree N must lie in [4, 64], got " + std::to_string(n));
  if (reference_degree && (*reference_degree < 4 || *reference_degree > 128)) {
    throw std::invalid_argument("reference degree must lie in [4, 128]");
  }
  if (grid_points < 2) throw std::invalid_argument("grid points must be >= 2");
  if (plan.budget < 1) throw std::invalid_argument("budget must be >= 1");
  solver.validate();
}

ProblemSpec resolve_problem(const RunConfig& config) {
  const bool is_file = config.problem.find('/') != std::string::npos ||
                       (config.problem.size() > 5 && config.problem.ends_with(".toml"));
  ProblemSpec spec = is_file ? load_spec(config.problem) : lookup(config.problem);
  if (!config.parameters.empty()) spec = spec.with_parameters(config.parameters);
  return spec;
}

namespace {

double to_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw std::invalid_argument("run setting '" + key + "': '" + value + "' is not a number");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_number(key, value);
  if (v != std::floor(v)) throw std::invalid_argument("run setting '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void apply_run_settings(const std::map<std::string, std::string>& settings, RunConfig& config) {
  for (const auto& [key, value] : settings) {
    if (key == "degree") config.degree = to_int(key, value);
    else if (key == "budget") config.plan.budget = to_int(key, value);
    else if (key == "strategy") config.plan.strategy = parse_strategy(value);
    else if (key == "subset") config.plan.subset = split(value, ',');
    else if (key == "perturb_subset") config.plan.perturb_subset = value == "true";
    else if (key == "perturbation") config.plan.perturbation = to_number(key, value);
    else if (key == "shift") config.plan.shift = to_number(key, value);
    else if (key == "seed") config.plan.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "hessian") {
      if (value == "gn" || value == "gauss_newton") config.solver.hessian = HessianMode::gauss_newton;
      else if (value == "full") config.solver.hessian = HessianMode::full;
      else throw std::invalid_argument("run setting 'hessian' must be gn or full");
    } else if (key == "max_iterations") config.solver.max_iterations = to_int(key, value);
    else if (key == "tolerance") config.solver.tolerance = to_number(key, value);
    else if (key == "initial_radius") config.solver.initial_radius = parse_initial_radius(value);
    else if (key == "radius") config.solver.radius = to_number(key, value);
    else if (key == "guess") config.guess = value;
    else if (key == "reference") config.reference_degree = to_int(key, value);
    else if (key == "points") config.grid_points = to_int(key, value);
    else throw std::invalid_argument("unknown run setting '" + key + "'");
  }
}

Vector transfer_coefficients(const Vector& coeffs, int dimension, Eigen::Index target_size) {
  if (dimension == 1) {
    Vector out = Vector::Zero(target_size);
    const Eigen::Index n = std::min(coeffs.size(), target_size);
    out.head(n) = coeffs.head(n);
    return out;
  }
  const auto side = [](Eigen::Index n) {
    const auto m = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (m * m != n) throw std::invalid_argument("transfer_coefficients: 2D size is not a square");
    return m;
  };
  const Eigen::Index m = side(coeffs.size());
  const Eigen::Index t = side(target_size);
  const Eigen::Map<const Matrix> u(coeffs.data(), m, m);
  Matrix out = Matrix::Zero(t, t);
  const Eigen::Index k = std::min(m, t);
  out.topLeftCorner(k, k) = u.topLeftCorner(k, k);
  return Eigen::Map<const Vector>(out.data(), out.size());
}

RunResult run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.spec = resolve_problem(config);
  config.validate(result.spec);
  result.degree = config.degree.value_or(result.spec.default_degree);
  result.guess = config.guess.value_or(result.spec.initial_guess);
  result.seed = config.plan.seed;
  result.system = build_system(result.spec, result.degree);

  DeflationLedger seed_ledger;
  if (!config.ledger_path.empty()) {
    std::ifstream in(config.ledger_path);
    if (!in) throw std::runtime_error("cannot open ledger '" + config.ledger_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    seed_ledger = DeflationLedger::from_json(text.str());
  }
  const std::size_t known = seed_ledger.size();
  const Vector x0 = initial_guess(result.guess, result.system->size());
  result.search = find_multiple(*result.system, x0, config.plan, config.solver, std::move(seed_ledger));

  std::unique_ptr<SpectralSystem> reference;
  if (config.reference_degree) reference = build_system(result.spec, *config.reference_degree);

  const auto& entries = result.search.ledger.entries();
  for (std::size_t i = known; i < entries.size(); ++i) {
    const auto& e = entries[i];
    SolutionRow row;
    row.label = e.label;
    row.round = e.round;
    row.residual_inf = e.residual_inf;
    for (const auto& r : result.search.rounds) {
      if (r.round == e.round) {
        row.iterations = r.outcome.iterations;
        row.seconds = r.outcome.seconds;
      }
    }
    row.symmetry = check_symmetry(result.spec, *result.system, e.root, config.grid_points);
    if (reference) {
      TrustRegionConfig polish = config.solver;
      const auto ref = tr_iterate(*reference, transfer_coefficients(e.root, result.spec.dimension, reference->size()),
                                  polish);
      if (ref.converged()) {
        row.error = max_abs_difference(result.system->sample(e.root, config.grid_points),
                                       reference->sample(ref.x, config.grid_points));
      }
    }
    result.rows.push_back(std::move(row));
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

std::string sci(double v, int digits = 4) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(digits) << v;
  return o.str();
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_line(const RunResult& r, const std::string& extra) {
  std::string h = "# problem=" + r.spec.id + " degree=" + std::to_string(r.degree) + " seed=" + std::to_string(r.seed);
  for (const auto& [k, v] : r.spec.parameters) h += " " + k + "=" + exact(v);
  if (!extra.empty()) h += " " + extra;
  return h + "\n";
}

}  // namespace

std::string report_markdown(const RunResult& r) {
  std::ostringstream out;
  out << "# " << r.spec.id << "\n\n";
  out << "- equation: " << r.spec.equation << "\n";
  out << "- parameters:";
  for (const auto& [k, v] : r.spec.parameters) out << " " << k << "=" << v;
  out << "\n- degree N: " << r.degree << "\n- initial guess: " << r.guess << "\n- seed: " << r.seed << "\n";
  out << "- deflations: " << (r.rows.empty() ? 0 : r.rows.size() - 1) << "\n";
  if (r.spec.expected_solutions) out << "- published solution count: " << *r.spec.expected_solutions << "\n";
  out << "\n| Solution | n_it | Time(s) | ‖F‖∞ | L∞ error | Symmetry defects |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& row : r.rows) {
    std::string sym;
    for (const auto& c : row.symmetry) sym += (sym.empty() ? "" : ", ") + to_string(c.symmetry) + "=" + sci(c.self_defect, 1);
    out << "| " << row.label << " | " << row.iterations << " | " << std::fixed << std::setprecision(4) << row.seconds
        << std::defaultfloat << " | " << sci(row.residual_inf) << " | " << (row.error ? sci(*row.error) : "-") << " | "
        << (sym.empty() ? "-" : sym) << " |\n";
  }
  out << "\n## Rounds\n\n| Round | n_it | Status | Outcome |\n|---|---|---|---|\n";
  for (const auto& rd : r.search.rounds) {
    out << "| " << rd.round << " | " << rd.outcome.iterations << " | " << to_string(rd.outcome.status) << " | "
        << rd.note << " |\n";
  }
  return out.str();
}

void write_outputs(const RunResult& r, const RunConfig& config) {
  if (config.out_dir.empty()) return;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };

  const auto& entries = r.search.ledger.entries();
  for (const auto& row : r.rows) {
    const auto& e = entries[r.search.ledger.index_of(row.label)];
    if (config.emit.coefficients) {
      nlohmann::json j = {{"problem", r.spec.id},
                          {"parameters", r.spec.parameters},
                          {"degree", r.degree},
                          {"basis", r.system->basis_name()},
                          {"label", row.label},
                          {"seed", r.seed},
                          {"iterations", row.iterations},
                          {"residual_inf", row.residual_inf},
                          {"coefficients", std::vector<double>(e.root.data(), e.root.data() + e.root.size())}};
      write("solution_" + row.label + ".json", j.dump(2) + "\n");
    }
    if (config.emit.grid) {
      const GridSamples g = r.system->sample(e.root, config.grid_points);
      std::ostringstream csv;
      csv << header_line(r, "label=" + row.label);
      csv << (g.dimension == 2 ? "x,y,u\n" : "x,u\n");
      const std::size_t ny = g.dimension == 2 ? g.y.size() : 1;
      for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < g.x.size(); ++i) {
          csv << exact(g.x[i]) << ",";
          if (g.dimension == 2) csv << exact(g.y[j]) << ",";
          csv << exact(g.at(i, j)) << "\n";
        }
      }
      write("solution_" + row.label + ".csv", csv.str());
    }
  }
  if (config.emit.trace) {
    for (const auto& rd : r.search.rounds) {
      std::ostringstream csv;
      csv << header_line(r, "round=" + std::to_string(rd.round));
      csv << "k,Q,grad_norm,radius,ratio,step_norm,step_kind,accepted\n";
      for (const auto& t : rd.outcome.trace) {
        csv << t.iteration << "," << exact(t.objective) << "," << exact(t.gradient_norm) << "," << exact(t.radius) << ","
            << exact(t.ratio) << "," << exact(t.step_norm) << "," << to_string(t.kind) << "," << (t.accepted ? 1 : 0)
            << "\n";
      }
      write("trace_round" + std::to_string(rd.round) + ".csv", csv.str());
    }
  }
  if (config.emit.report) write("report.md", report_markdown(r));

  nlohmann::json ledger = nlohmann::json::parse(r.search.ledger.to_json());
  ledger["problem"] = r.spec.id;
  ledger["parameters"] = r.spec.parameters;
  ledger["degree"] = r.degree;
  ledger["basis"] = r.system->basis_name();
  ledger["seed"] = r.seed;
  write("ledger.json", ledger.dump(2) + "\n");

  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::json meta = {{"finished", stamp}, {"seconds", r.seconds}, {"seed", r.seed}};
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& rd : r.search.rounds) rounds.push_back({{"round", rd.round}, {"seconds", rd.outcome.seconds}});
  meta["rounds"] = rounds;
  write("run_meta.json", meta.dump(2) + "\n");
}

std::uint64_t derive_seed(std::uint64_t base, std::size_t index) {
  // splitmix64 finaliser of base + golden-ratio multiple of the index.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<RunResult> run_sweep(const RunConfig& base, const std::string& name, const std::vector<double>& values,
                                 int threads) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  if (threads < 1) threads = 1;
  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig c = base;
    c.parameters[name] = values[i];
    c.plan.seed = derive_seed(base.plan.seed, i);
    if (!base.out_dir.empty()) {
      char label[64];
      std::snprintf(label, sizeof label, "%s_%g", name.c_str(), values[i]);
      c.out_dir = (fs::path(base.out_dir) / label).string();
    }
    resolve_problem(c).validate();
    configs.push_back(std::move(c));
  }
  std::vector<RunResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::size_t next = 0;
  std::mutex lock;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> g(lock);
        if (next >= configs.size()) return;
        i = next++;
      }
      try {
        results[i] = run(configs[i]);
        write_outputs(results[i], configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(threads, static_cast<int>(configs.size())); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::map<std::string, GridSamples> read_solutions(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a run directory: " + dir);
  std::map<std::string, GridSamples> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with("solution_") || entry.path().extension() != ".csv") continue;
    const std::string label = name.substr(9, name.size() - 9 - 4);
    std::ifstream in(entry.path());
    std::string line;
    GridSamples g;
    bool header = false;
    std::vector<double> xs, ys;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        header = true;
        g.dimension = line == "x,y,u" ? 2 : 1;
        continue;
      }
      const auto cols = split(line, ',');
      if (cols.size() != static_cast<std::size_t>(g.dimension + 1)) {
        throw std::runtime_error("malformed row in " + entry.path().string());
      }
      xs.push_back(std::stod(cols[0]));
      if (g.dimension == 2) ys.push_back(std::stod(cols[1]));
      g.values.push_back(std::stod(cols.back()));
    }
    if (g.dimension == 1) {
      g.x = xs;
    } else {
      for (std::size_t i = 0; i < xs.size() && (i == 0 || xs[i] != xs[0]); ++i) g.x.push_back(xs[i]);
      for (std::size_t j = 0; j < ys.size(); j += g.x.size()) g.y.push_back(ys[j]);
      if (g.x.size() * g.y.size() != g.values.size()) throw std::runtime_error("ragged grid in " + entry.path().string());
    }
    out[label] = std::move(g);
  }
  return out;
}

Comparison compare_solutions(const std::map<std::string, GridSamples>& a,
                             const std::map<std::string, GridSamples>& b) {
  struct Candidate {
    double d;
    std::string la, lb;
  };
  std::vector<Candidate> all;
  for (const auto& [la, ga] : a) {
    for (const auto& [lb, gb] : b) {
      if (ga.values.size() != gb.values.size() || ga.dimension != gb.dimension) continue;
      all.push_back({max_abs_difference(ga, gb), la, lb});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) { return x.d < y.d; });
  Comparison c;
  std::map<std::string, bool> used_a, used_b;
  for (const auto& cand : all) {
    if (used_a[cand.la] || used_b[cand.lb]) continue;
    used_a[cand.la] = used_b[cand.lb] = true;
    c.pairs.push_back({cand.la, cand.lb, cand.d});
  }
  for (const auto& [la, g] : a) {
    if (!used_a[la]) c.unpaired_a.push_back(la);
  }
  for (const auto& [lb, g] : b) {
    if (!used_b[lb]) c.unpaired_b.push_back(lb);
  }
  return c;
}

Comparison compare_runs(const std::string& dir_a, const std::string& dir_b) {
  return compare_solutions(read_solutions(dir_a), read_solutions(dir_b));
}

std::string comparison_markdown(const Comparison& c) {
  std::ostringstream out;
  out << "| Solution A | Solution B | L_inf difference |\n|---|---|---|\n";
  for (const auto& p : c.pairs) out << "| " << p.label_a << " | " << p.label_b << " | " << sci(p.difference) << " |\n";
  for (const auto& l : c.unpaired_a) out << "| " << l << " | (unpaired) | - |\n";
  for (const auto& l : c.unpaired_b) out << "| (unpaired) | " << l << " | - |\n";
  return out.str();
}

}  // namespace multisol
