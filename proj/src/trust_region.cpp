#include "multisol/trust_region.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace multisol {

void TrustRegionConfig::validate() const {
  if (!(shrink_threshold > 0.0 && shrink_threshold < expand_threshold && expand_threshold < 1.0)) {
    throw std::invalid_argument("TrustRegionConfig: need 0 < shrink_threshold < expand_threshold < 1");
  }
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0 && expand_factor > 1.0)) {
    throw std::invalid_argument("TrustRegionConfig: need 0 < shrink_factor < 1 < expand_factor");
  }
  if (!(tolerance > 0.0) || !(min_radius >= 0.0) || !(step_tolerance >= 0.0)) {
    throw std::invalid_argument("TrustRegionConfig: tolerances must be positive");
  }
  if (initial_radius == InitialRadius::fixed && !(radius > 0.0)) {
    throw std::invalid_argument("TrustRegionConfig: fixed initial radius must be positive");
  }
  if (max_iterations < 1) throw std::invalid_argument("TrustRegionConfig: max_iterations must be >= 1");
}

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::cauchy_clipped: return "cauchy_clipped";
    case StepKind::dogleg_interp: return "dogleg_interp";
    case StepKind::full_newton: return "full_newton";
    case StepKind::negative_curvature: return "negative_curvature";
    case StepKind::singular_fallback: return "singular_fallback";
  }
  return "unknown";
}

std::string to_string(InitialRadius policy) {
  switch (policy) {
    case InitialRadius::gradient_norm: return "gradient_norm";
    case InitialRadius::iterate_scale: return "iterate_scale";
    case InitialRadius::fixed: return "fixed";
  }
  return "unknown";
}

InitialRadius parse_initial_radius(const std::string& name) {
  if (name == "gradient_norm") return InitialRadius::gradient_norm;
  if (name == "iterate_scale") return InitialRadius::iterate_scale;
  if (name == "fixed") return InitialRadius::fixed;
  throw std::invalid_argument("unknown initial radius policy '" + name +
                              "' (expected gradient_norm, iterate_scale or fixed)");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::stalled_radius: return "stalled_radius";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::diverged_evaluation: return "diverged_evaluation";
  }
  return "unknown";
}

DoglegStep dogleg_step(const Vector& g, double curvature, const Vector* newton, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("dogleg_step: radius must be positive");
  const double gnorm = g.norm();
  if (gnorm == 0.0) return {Vector::Zero(g.size()), StepKind::full_newton};
  const Vector boundary = -(radius / gnorm) * g;
  if (!(curvature > 0.0)) return {boundary, StepKind::negative_curvature};

  const Vector cauchy = -(gnorm * gnorm / curvature) * g;
  if (newton == nullptr) {
    if (cauchy.norm() >= radius) return {boundary, StepKind::singular_fallback};
    return {cauchy, StepKind::singular_fallback};
  }
  if (newton->norm() <= radius) return {*newton, StepKind::full_newton};
  const double cnorm = cauchy.norm();
  if (cnorm >= radius) return {boundary, StepKind::cauchy_clipped};

  // ||cauchy + t (newton - cauchy)|| = radius for t in [0, 1].
  const Vector d = *newton - cauchy;
  const double a = d.squaredNorm();
  const double b = 2.0 * cauchy.dot(d);
  const double c = cnorm * cnorm - radius * radius;
  const double disc = std::sqrt(std::max(b * b - 4.0 * a * c, 0.0));
  // c < 0, so the positive root is numerically stable in this form.
  const double t = b >= 0.0 ? (-2.0 * c) / (b + disc) : (disc - b) / (2.0 * a);
  return {cauchy + t * d, StepKind::dogleg_interp};
}

namespace {

// Newton point -G^{-1} g when G is positive definite.
std::optional<Vector> spd_newton_point(const Matrix& hess, const Vector& g) {
  Eigen::LLT<Matrix> llt(hess);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Vector s = -llt.solve(g);
  if (!s.allFinite()) return std::nullopt;
  return s;
}

// Newton point -J^{-1} F for the Gauss-Newton model, whose minimizer
// coincides with the root of the linearization when J is nonsingular.
std::optional<Vector> jacobian_newton_point(const Matrix& jac, const Vector& f) {
  Eigen::PartialPivLU<Matrix> lu(jac);
  if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) return std::nullopt;
  Vector s = -lu.solve(f);
  if (!s.allFinite()) return std::nullopt;
  return s;
}

}  // namespace

DoglegStep dogleg_step(const Vector& g, const Matrix& hess, double radius) {
  if (hess.rows() != g.size() || hess.cols() != g.size()) {
    throw std::invalid_argument("dogleg_step: Hessian shape does not match gradient");
  }
  const double curvature = g.dot(hess * g);
  const auto newton = spd_newton_point(hess, g);
  return dogleg_step(g, curvature, newton ? &*newton : nullptr, radius);
}

Matrix hessian(const DiscretizedSystem& system, const Vector& x, HessianMode mode) {
  const Vector f = system.residual(x);
  const Matrix j = system.jacobian(x);
  Matrix g = j.transpose() * j;
  if (mode == HessianMode::gauss_newton) return g;
  if (auto second = system.weighted_hessian(x, f)) {
    g += *second;
    return g;
  }
  // Column i of sum_k F_k Hess(F_k) is d/dx_i (J^T F) - J^T J e_i.
  const double h = 1e-6 * (1.0 + x.lpNorm<Eigen::Infinity>());
  const Vector jtf = j.transpose() * f;
  Matrix second(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    xp[i] += h;
    second.col(i) = (system.jacobian(xp).transpose() * f - jtf) / h;
  }
  g += 0.5 * (second + second.transpose());
  return g;
}

namespace {

struct Point {
  Vector x;
  Vector f;
  Matrix j;
  Vector g;
  double q = 0.0;
};

Point evaluate(const DiscretizedSystem& system, const Vector& x) {
  Point p;
  p.x = x;
  p.f = system.residual(x);
  p.j = system.jacobian(x);
  p.g = p.j.transpose() * p.f;
  p.q = 0.5 * p.f.squaredNorm();
  return p;
}

void finish(SolveOutcome& out, const Point& p, SolveStatus status, std::string message) {
  out.status = status;
  out.x = p.x;
  out.residual_inf = p.f.lpNorm<Eigen::Infinity>();
  out.gradient_norm = p.g.norm();
  out.objective = p.q;
  out.message = std::move(message);
}

}  // namespace

SolveOutcome tr_iterate(const DiscretizedSystem& system, const Vector& x0, const TrustRegionConfig& config) {
  config.validate();
  if (x0.size() != system.size()) throw std::invalid_argument("tr_iterate: initial guess has the wrong size");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  SolveOutcome out;
  out.x = x0;
  Point cur;
  try {
    cur = evaluate(system, x0);
  } catch (const EvaluationError& e) {
    out.status = SolveStatus::diverged_evaluation;
    out.residual_inf = std::numeric_limits<double>::infinity();
    out.gradient_norm = out.residual_inf;
    out.objective = out.residual_inf;
    out.message = std::string("initial guess: ") + e.what();
    out.seconds = elapsed();
    return out;
  }

  double radius = 1.0;
  switch (config.initial_radius) {
    case InitialRadius::gradient_norm: radius = cur.g.norm(); break;
    case InitialRadius::iterate_scale: radius = std::max(1.0, x0.norm()); break;
    case InitialRadius::fixed: radius = config.radius; break;
  }
  if (!(radius > 0.0)) radius = 1.0;

  for (int k = 0; k < config.max_iterations; ++k) {
    const double gnorm = cur.g.norm();
    if (gnorm <= config.tolerance && cur.q <= config.tolerance) {
      finish(out, cur, SolveStatus::converged, "gradient and objective below tolerance");
      out.iterations = k;
      out.seconds = elapsed();
      return out;
    }

    DoglegStep step;
    double predicted = 0.0;
    if (config.hessian == HessianMode::gauss_newton) {
      const Vector jg = cur.j * cur.g;
      const auto newton = jacobian_newton_point(cur.j, cur.f);
      step = dogleg_step(cur.g, jg.squaredNorm(), newton ? &*newton : nullptr, radius);
      predicted = -(cur.g.dot(step.step) + 0.5 * (cur.j * step.step).squaredNorm());
    } else {
      Matrix g2 = cur.j.transpose() * cur.j;
      if (auto second = system.weighted_hessian(cur.x, cur.f)) {
        g2 += *second;
      } else {
        g2 = hessian(system, cur.x, HessianMode::full);
      }
      step = dogleg_step(cur.g, g2, radius);
      predicted = -(cur.g.dot(step.step) + 0.5 * step.step.dot(g2 * step.step));
    }
    const double step_norm = step.step.norm();

    IterationRecord rec;
    rec.iteration = k;
    rec.objective = cur.q;
    rec.gradient_norm = gnorm;
    rec.radius = radius;
    rec.step_norm = step_norm;
    rec.kind = step.kind;

    if (!(predicted > 0.0)) {
      // The model cannot be decreased: x is a stationary point of the model.
      rec.ratio = 0.0;
      out.trace.push_back(rec);
      out.iterations = k + 1;
      out.seconds = elapsed();
      if (cur.q <= config.tolerance) {
        finish(out, cur, SolveStatus::converged, "model stationary with objective below tolerance");
      } else {
        finish(out, cur, SolveStatus::stalled_radius, "model stationary at a nonzero residual");
      }
      return out;
    }

    Point trial;
    bool trial_ok = true;
    double ratio = -std::numeric_limits<double>::infinity();
    try {
      trial.f = system.residual(cur.x + step.step);
      trial.q = 0.5 * trial.f.squaredNorm();
      ratio = (cur.q - trial.q) / predicted;
    } catch (const EvaluationError&) {
      trial_ok = false;
    }
    rec.ratio = ratio;
    rec.accepted = trial_ok && ratio >= config.shrink_threshold;

    if (ratio < config.shrink_threshold) {
      radius *= config.shrink_factor;
    } else if (ratio > config.expand_threshold && std::abs(step_norm - radius) <= 1e-12 * radius) {
      radius *= config.expand_factor;
    }
    out.trace.push_back(rec);

    if (rec.accepted) {
      try {
        cur = evaluate(system, cur.x + step.step);
      } catch (const EvaluationError& e) {
        finish(out, cur, SolveStatus::diverged_evaluation, std::string("accepted iterate: ") + e.what());
        out.iterations = k + 1;
        out.seconds = elapsed();
        return out;
      }
    }

    const bool at_floor = step.kind == StepKind::full_newton && cur.q <= config.tolerance &&
                          step_norm <= config.step_tolerance * (1.0 + cur.x.norm());
    if (at_floor) {
      finish(out, cur, SolveStatus::converged, "Newton step below step tolerance");
      out.iterations = k + 1;
      out.seconds = elapsed();
      return out;
    }
    if (radius < config.min_radius) {
      finish(out, cur, SolveStatus::stalled_radius, "trust radius below minimum");
      out.iterations = k + 1;
      out.seconds = elapsed();
      return out;
    }
  }
  finish(out, cur, SolveStatus::max_iterations, "iteration limit reached");
  out.iterations = config.max_iterations;
  out.seconds = elapsed();
  return out;
}

std::vector<double> newton_iterate(const DiscretizedSystem& system, const Vector& x0, int iterations) {
  std::vector<double> norms;
  Vector x = x0;
  for (int k = 0; k <= iterations; ++k) {
    try {
      const Vector f = system.residual(x);
      norms.push_back(f.norm());
      if (k == iterations) break;
      Eigen::PartialPivLU<Matrix> lu(system.jacobian(x));
      const Vector s = lu.solve(f);
      if (!s.allFinite()) throw EvaluationError("newton_iterate: singular Jacobian");
      x -= s;
    } catch (const EvaluationError&) {
      norms.push_back(std::numeric_limits<double>::infinity());
      break;
    }
  }
  return norms;
}

}  // namespace multisol
