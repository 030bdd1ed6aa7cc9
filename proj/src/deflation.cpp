#include "multisol/deflation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace multisol {

std::string roman_label(int n) {
  if (n < 1) throw std::invalid_argument("roman_label: n must be >= 1");
  static const std::pair<int, const char*> table[] = {{1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"},
                                                      {100, "C"},  {90, "XC"},  {50, "L"},  {40, "XL"},
                                                      {10, "X"},   {9, "IX"},   {5, "V"},   {4, "IV"},
                                                      {1, "I"}};
  std::string out;
  for (const auto& [value, glyph] : table) {
    while (n >= value) {
      out += glyph;
      n -= value;
    }
  }
  return out;
}

double DeflationLedger::separation_threshold() const {
  double scale = 0.0;
  for (const auto& e : entries_) scale = std::max(scale, e.root.lpNorm<Eigen::Infinity>());
  return separation * (1.0 + scale);
}

int DeflationLedger::find_duplicate(const Vector& x) const {
  double scale = x.lpNorm<Eigen::Infinity>();
  for (const auto& e : entries_) scale = std::max(scale, e.root.lpNorm<Eigen::Infinity>());
  const double tol = separation * (1.0 + scale);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].root.size() == x.size() && (entries_[i].root - x).lpNorm<Eigen::Infinity>() <= tol) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

bool DeflationLedger::add(const Vector& x, double residual_inf, int round) {
  if (find_duplicate(x) >= 0) return false;
  entries_.push_back({roman_label(static_cast<int>(entries_.size()) + 1), x, residual_inf, round});
  return true;
}

std::size_t DeflationLedger::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].label == label) return i;
  }
  if (!label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const std::size_t k = std::stoul(label);
    if (k >= 1 && k <= entries_.size()) return k - 1;
  }
  throw std::out_of_range("DeflationLedger: no root labelled '" + label + "'");
}

std::string DeflationLedger::to_json() const {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& e : entries_) {
    roots.push_back({{"label", e.label},
                     {"round", e.round},
                     {"residual_inf", e.residual_inf},
                     {"coefficients", std::vector<double>(e.root.data(), e.root.data() + e.root.size())}});
  }
  nlohmann::json doc = {{"deflation_power", 2},
                        {"deflation_shift", shift},
                        {"separation", separation},
                        {"min_distance", DeflatedSystem::min_distance},
                        {"roots", roots}};
  return doc.dump(2);
}

DeflationLedger DeflationLedger::from_json(const std::string& text) {
  DeflationLedger ledger;
  try {
    const auto doc = nlohmann::json::parse(text);
    ledger.shift = doc.value("deflation_shift", 1.0);
    for (const auto& r : doc.at("roots")) {
      const auto c = r.at("coefficients").get<std::vector<double>>();
      LedgerEntry e;
      e.label = r.at("label").get<std::string>();
      e.round = r.value("round", 0);
      e.residual_inf = r.value("residual_inf", 0.0);
      e.root = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
      ledger.entries_.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("DeflationLedger::from_json: ") + e.what());
  }
  return ledger;
}

DeflatedSystem::DeflatedSystem(const DiscretizedSystem& inner, std::vector<Vector> roots, double shift)
    : inner_(inner), roots_(std::move(roots)), shift_(shift) {
  if (!(shift > 0.0)) throw std::invalid_argument("DeflatedSystem: shift must be positive");
  for (const auto& r : roots_) {
    if (r.size() != inner_.size()) throw std::invalid_argument("DeflatedSystem: root has the wrong size");
  }
}

std::vector<double> DeflatedSystem::squared_distances(const Vector& x) const {
  std::vector<double> d2;
  d2.reserve(roots_.size());
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    const double s = (x - roots_[i]).squaredNorm();
    if (!(s >= min_distance * min_distance)) {
      throw ProximityError("DeflatedSystem: iterate within minimum distance of root " + std::to_string(i), i);
    }
    d2.push_back(s);
  }
  return d2;
}

double DeflatedSystem::multiplier(const Vector& x) const {
  double mu = 1.0;
  for (double s : squared_distances(x)) mu *= shift_ + 1.0 / s;
  return mu;
}

Vector DeflatedSystem::multiplier_gradient(const Vector& x) const {
  const auto d2 = squared_distances(x);
  double mu = 1.0;
  for (double s : d2) mu *= shift_ + 1.0 / s;
  Vector grad = Vector::Zero(x.size());
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    grad += (-2.0 / (d2[i] * (shift_ * d2[i] + 1.0))) * (x - roots_[i]);
  }
  return mu * grad;
}

Vector DeflatedSystem::residual(const Vector& x) const {
  Vector r = multiplier(x) * inner_.residual(x);
  require_finite(r, "DeflatedSystem::residual");
  return r;
}

Matrix DeflatedSystem::jacobian(const Vector& x) const {
  const double mu = multiplier(x);
  Matrix j = mu * inner_.jacobian(x);
  if (!roots_.empty()) j.noalias() += inner_.residual(x) * multiplier_gradient(x).transpose();
  if (!j.allFinite()) throw EvaluationError("DeflatedSystem::jacobian: non-finite entry");
  return j;
}

std::optional<Matrix> DeflatedSystem::weighted_hessian(const Vector& x, const Vector& w) const {
  auto inner = inner_.weighted_hessian(x, w);
  if (!inner) return std::nullopt;
  const double mu = multiplier(x);
  Matrix h = mu * *inner;
  if (roots_.empty()) return h;

  // mu = exp(sum_i phi(s_i)) with s_i = ||x - r_i||^2 and phi(s) = log(shift + 1/s).
  const auto d2 = squared_distances(x);
  const Eigen::Index n = x.size();
  Vector v = Vector::Zero(n);
  Matrix hess_log = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    const double s = d2[i];
    const double p1 = -1.0 / (s * (shift_ * s + 1.0));
    const double p2 = (2.0 * shift_ * s + 1.0) / (s * s * (shift_ * s + 1.0) * (shift_ * s + 1.0));
    const Vector e = x - roots_[i];
    v += 2.0 * p1 * e;
    hess_log.noalias() += 4.0 * p2 * e * e.transpose();
    hess_log.diagonal().array() += 2.0 * p1;
  }
  const Vector grad_mu = mu * v;
  const Matrix hess_mu = mu * (v * v.transpose() + hess_log);
  const Vector jtw = inner_.jacobian(x).transpose() * w;
  const double fw = inner_.residual(x).dot(w);
  h.noalias() += grad_mu * jtw.transpose() + jtw * grad_mu.transpose();
  h += fw * hess_mu;
  return h;
}

std::string to_string(DeflationStrategy s) {
  switch (s) {
    case DeflationStrategy::same_guess: return "same_guess";
    case DeflationStrategy::perturb_last: return "perturb_last";
    case DeflationStrategy::ledger_subset: return "ledger_subset";
  }
  return "unknown";
}

DeflationStrategy parse_strategy(const std::string& name) {
  if (name == "same_guess") return DeflationStrategy::same_guess;
  if (name == "perturb_last") return DeflationStrategy::perturb_last;
  if (name == "ledger_subset") return DeflationStrategy::ledger_subset;
  throw std::invalid_argument("unknown deflation strategy '" + name +
                              "' (expected same_guess, perturb_last or ledger_subset)");
}

MultipleSolveResult find_multiple(const DiscretizedSystem& system, const Vector& initial_guess,
                                  const DeflationPlan& plan, const TrustRegionConfig& config,
                                  DeflationLedger ledger) {
  if (plan.budget < 1) throw std::invalid_argument("find_multiple: budget must be >= 1");
  if (!(plan.root_tolerance > 0.0)) throw std::invalid_argument("find_multiple: root tolerance must be positive");
  if (!(plan.shift > 0.0)) throw std::invalid_argument("find_multiple: deflation shift must be positive");
  if (initial_guess.size() != system.size()) {
    throw std::invalid_argument("find_multiple: initial guess has the wrong size");
  }
  if (!plan.subset.empty() && plan.strategy != DeflationStrategy::ledger_subset) {
    throw std::invalid_argument("find_multiple: a root subset requires the ledger_subset strategy");
  }
  for (const auto& e : ledger.entries()) {
    if (e.root.size() != system.size()) throw std::invalid_argument("find_multiple: ledger root has the wrong size");
  }
  config.validate();

  std::vector<std::size_t> active;
  if (plan.strategy == DeflationStrategy::ledger_subset) {
    for (const auto& label : plan.subset) active.push_back(ledger.index_of(label));
  } else {
    for (std::size_t i = 0; i < ledger.size(); ++i) active.push_back(i);
  }

  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto perturbed = [&](const Vector& center) {
    const double amp = plan.perturbation * (1.0 + center.lpNorm<Eigen::Infinity>());
    Vector x(center.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = center[i] + amp * unit(rng);
    return x;
  };

  MultipleSolveResult result;
  for (int round = 1; round <= plan.budget; ++round) {
    DeflationRound rec;
    rec.round = round;

    bool random_guess = false;
    const bool have_active = !active.empty();
    switch (plan.strategy) {
      case DeflationStrategy::same_guess: break;
      case DeflationStrategy::perturb_last: random_guess = have_active; break;
      case DeflationStrategy::ledger_subset: random_guess = plan.perturb_subset && have_active; break;
    }
    rec.initial_guess = random_guess ? perturbed(ledger.entries()[active.back()].root) : initial_guess;

    std::vector<Vector> roots;
    for (std::size_t i : active) roots.push_back(ledger.entries()[i].root);
    const DeflatedSystem deflated(system, std::move(roots), plan.shift);
    rec.outcome = tr_iterate(deflated, rec.initial_guess, config);

    if (rec.outcome.converged()) {
      double undeflated = std::numeric_limits<double>::infinity();
      try {
        undeflated = system.residual(rec.outcome.x).lpNorm<Eigen::Infinity>();
      } catch (const EvaluationError&) {
      }
      const int dup = ledger.find_duplicate(rec.outcome.x);
      if (!(undeflated <= plan.root_tolerance)) {
        rec.note = "spurious: deflated residual vanished but ||F||_inf = " + std::to_string(undeflated);
      } else if (dup >= 0) {
        rec.label = ledger.entries()[static_cast<std::size_t>(dup)].label;
        rec.note = "converged to known root " + rec.label;
      } else if (ledger.add(rec.outcome.x, undeflated, round)) {
        rec.new_root = true;
        rec.label = ledger.entries().back().label;
        rec.note = "new root " + rec.label;
        active.push_back(ledger.size() - 1);
      }
    } else {
      rec.note = "no root: " + to_string(rec.outcome.status);
    }
    const bool repeatable = !random_guess && !(plan.strategy == DeflationStrategy::perturb_last && !active.empty());
    const bool stop = !rec.new_root && repeatable;
    if (stop) rec.note += "; next round would repeat this one, stopping";
    result.rounds.push_back(std::move(rec));
    if (stop) break;
  }
  ledger.shift = plan.shift;
  result.ledger = std::move(ledger);
  return result;
}

}  // namespace multisol
