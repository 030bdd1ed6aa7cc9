#pragma once

#include "multisol/deflation.hpp"
#include "multisol/problems.hpp"
#include "multisol/trust_region.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace multisol {

struct EmitOptions {
  bool coefficients = true;
  bool grid = true;
  bool trace = true;
  bool report = true;
};

struct RunConfig {
  std::string problem = "bratu";  ///< catalog id or path to a TOML problem config
  std::map<std::string, double> parameters;  ///< overrides of the problem parameters
  std::optional<int> degree;                 ///< defaults to the problem's degree
  std::optional<std::string> guess;          ///< defaults to the problem's initial guess
  TrustRegionConfig solver;
  DeflationPlan plan;
  std::string ledger_path;  ///< JSON ledger of known roots to start from
  std::optional<int> reference_degree;  ///< self-convergence reference resolution
  int grid_points = 101;
  std::string out_dir;  ///< empty: nothing is written
  EmitOptions emit;

  /// Throws std::invalid_argument unless 4 <= N <= 64, grid_points >= 2 and
  /// the solver and deflation settings are valid.
  void validate(const ProblemSpec& spec) const;
};

/// Resolves the problem of a config: catalog lookup or TOML file, then the
/// parameter overrides.
ProblemSpec resolve_problem(const RunConfig& config);

/// Applies the [run] table of a TOML problem config to a RunConfig.
void apply_run_settings(const std::map<std::string, std::string>& settings, RunConfig& config);

/// Zero-padded or truncated copy of spectral coefficients for a system of
/// another degree. The bases are hierarchical, so leading coefficients keep
/// their meaning across N.
Vector transfer_coefficients(const Vector& coeffs, int dimension, Eigen::Index target_size);

struct SolutionRow {
  std::string label;
  int round = 0;
  int iterations = 0;
  double seconds = 0.0;
  double residual_inf = 0.0;        ///< undeflated ||F||_inf
  std::optional<double> error;      ///< max grid difference to the reference solution
  std::vector<SymmetryCheck> symmetry;
};

struct RunResult {
  ProblemSpec spec;
  int degree = 0;
  std::string guess;
  std::uint64_t seed = 0;
  std::shared_ptr<SpectralSystem> system;
  MultipleSolveResult search;
  std::vector<SolutionRow> rows;  ///< one per root found in this run, in label order
  double seconds = 0.0;

  bool any_converged() const { return !rows.empty(); }
};

/// Runs the multiple-solution search and post-processes the roots found.
RunResult run(const RunConfig& config);

/// Markdown table: label, n_it, time, ||F||_inf, error, symmetry defects.
std::string report_markdown(const RunResult& result);

/// Writes solution_<label>.json / .csv, trace_round<k>.csv, report.md,
/// ledger.json and run_meta.json into config.out_dir.
void write_outputs(const RunResult& result, const RunConfig& config);

/// Parameter sweep over one problem parameter. Each value runs in its own
/// worker thread with seed derived from the base seed and the value index,
/// writing to out_dir/<name>_<value> when out_dir is set.
std::vector<RunResult> run_sweep(const RunConfig& base, const std::string& name, const std::vector<double>& values,
                                 int threads);

/// Deterministic per-index seed for sweeps.
std::uint64_t derive_seed(std::uint64_t base, std::size_t index);

struct MatchedPair {
  std::string label_a;
  std::string label_b;
  double difference = 0.0;  ///< max |u_a - u_b| on the common grid
};

struct Comparison {
  std::vector<MatchedPair> pairs;
  std::vector<std::string> unpaired_a;
  std::vector<std::string> unpaired_b;
};

/// Grid samples of every solution_<label>.csv in a run directory.
std::map<std::string, GridSamples> read_solutions(const std::string& dir);

/// Greedy one-to-one matching by smallest grid difference.
Comparison compare_solutions(const std::map<std::string, GridSamples>& a,
                             const std::map<std::string, GridSamples>& b);
Comparison compare_runs(const std::string& dir_a, const std::string& dir_b);
std::string comparison_markdown(const Comparison& c);

}  // namespace multisol
