#pragma once

#include "multisol/system.hpp"
#include "multisol/trust_region.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace multisol {

/// Raised when a deflated residual is requested within the minimum distance
/// of a deflated root, where the multiplier is numerically unbounded.
class ProximityError : public EvaluationError {
 public:
  ProximityError(const std::string& what, std::size_t root) : EvaluationError(what), root_(root) {}
  std::size_t root() const { return root_; }

 private:
  std::size_t root_;
};

struct LedgerEntry {
  std::string label;  ///< roman numeral in discovery order: I, II, ...
  Vector root;
  double residual_inf = 0.0;  ///< ||F(root)||_inf of the undeflated system
  int round = 0;              ///< deflation round that found it
};

/// Roman numeral for n >= 1.
std::string roman_label(int n);

/// Ordered set of distinct roots found so far.
class DeflationLedger {
 public:
  /// Relative separation: two vectors are the same root when
  /// ||a - b||_inf <= separation * (1 + max ||r||_inf over the ledger).
  static constexpr double separation = 1e-6;

  double shift = 1.0;  ///< shift of the operator the roots were deflated with

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double separation_threshold() const;
  /// Index of a stored root within the separation threshold of x, or -1.
  int find_duplicate(const Vector& x) const;
  /// Appends x with the next label; returns false (and stores nothing) for a duplicate.
  bool add(const Vector& x, double residual_inf, int round);
  /// Index of the entry with this label; also accepts 1-based integers. Throws if absent.
  std::size_t index_of(const std::string& label) const;

  std::string to_json() const;
  static DeflationLedger from_json(const std::string& text);

 private:
  std::vector<LedgerEntry> entries_;
};

/// Deflated system G(x) = mu(x) F(x) with the shifted operator
///   mu(x) = prod_i (shift + ||x - r_i||^-2).
class DeflatedSystem : public DiscretizedSystem {
 public:
  /// Below this distance to a root, evaluation raises ProximityError.
  static constexpr double min_distance = 1e-8;

  DeflatedSystem(const DiscretizedSystem& inner, std::vector<Vector> roots, double shift = 1.0);

  Eigen::Index size() const override { return inner_.size(); }
  Vector residual(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;
  std::optional<Matrix> weighted_hessian(const Vector& x, const Vector& w) const override;
  const SystemInfo& info() const override { return inner_.info(); }

  double multiplier(const Vector& x) const;
  Vector multiplier_gradient(const Vector& x) const;
  const std::vector<Vector>& roots() const { return roots_; }
  double shift() const { return shift_; }

 private:
  // Squared distances to each root, checked against min_distance.
  std::vector<double> squared_distances(const Vector& x) const;

  const DiscretizedSystem& inner_;
  std::vector<Vector> roots_;
  double shift_;
};

enum class DeflationStrategy {
  same_guess,     ///< every round restarts from the initial guess
  perturb_last,   ///< after the first round, start near the last root found
  ledger_subset,  ///< deflate only a chosen subset of known roots
};

std::string to_string(DeflationStrategy s);
DeflationStrategy parse_strategy(const std::string& name);

struct DeflationPlan {
  DeflationStrategy strategy = DeflationStrategy::same_guess;
  int budget = 4;                   ///< number of deflation rounds
  std::vector<std::string> subset;  ///< labels of initial-ledger roots to deflate (ledger_subset)
  bool perturb_subset = false;      ///< ledger_subset: start near the last subset root
  std::uint64_t seed = 0;
  double perturbation = 0.1;        ///< relative amplitude of random guess perturbations
  double shift = 1.0;               ///< deflation shift
  /// A converged deflated solve is a root only if ||F||_inf of the
  /// undeflated system is at most this; a small shift makes mu tiny far
  /// from the ledger, so a small deflated residual alone proves nothing.
  double root_tolerance = 1e-9;
};

struct DeflationRound {
  int round = 0;
  Vector initial_guess;
  SolveOutcome outcome;
  bool new_root = false;
  std::string label;  ///< label of the new root, or of the duplicate it matched
  std::string note;
};

struct MultipleSolveResult {
  std::vector<DeflationRound> rounds;
  DeflationLedger ledger;
};

/// Runs up to plan.budget trust-region solves, deflating every root found so
/// far (or the chosen subset plus new roots) before each round. Rounds stop
/// early when the strategy would repeat a deterministic failed round.
MultipleSolveResult find_multiple(const DiscretizedSystem& system, const Vector& initial_guess,
                                  const DeflationPlan& plan, const TrustRegionConfig& config = {},
                                  DeflationLedger ledger = {});

}  // namespace multisol
