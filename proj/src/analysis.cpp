#include "o2nc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace o2nc {

std::string to_string(Flavor flavor) {
  return flavor == Flavor::kL1 ? "L1" : "L2";
}

Flavor parse_flavor(std::string_view name) {
  if (name == "L2") return Flavor::kL2;
  if (name == "L1") return Flavor::kL1;
  throw std::invalid_argument("unknown flavor: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Regret ledger

RegretLedger::RegretLedger(double beta, double radius, std::size_t dim)
    : beta_(beta),
      radius_(radius),
      grad_sum_(dim, 0.0),
      exact_sum_(dim, 0.0),
      inner_coord_(dim, 0.0),
      sqnorm_coord_(dim, 0.0) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("ledger beta must lie in (0, 1]");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("ledger D must be positive");
}

void RegretLedger::observe(const ParamVector& g, const ParamVector& z) {
  observe(g, z, ParamVector::zeros(g.dim()));
}

void RegretLedger::observe(const ParamVector& g, const ParamVector& z,
                           const ParamVector& exact_grad) {
  require_same_dim(g, z);
  require_same_dim(g, exact_grad);
  if (g.dim() != dim()) throw DimensionError("ledger dimension mismatch");
  const double b2 = beta_ * beta_;
  double inner = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double gz = g[i] * z[i];
    const double gg = g[i] * g[i];
    inner += gz;
    sq += gg;
    grad_sum_[i] = beta_ * grad_sum_[i] + g[i];
    exact_sum_[i] = beta_ * exact_sum_[i] + exact_grad[i];
    inner_coord_[i] = beta_ * inner_coord_[i] + gz;
    sqnorm_coord_[i] = b2 * sqnorm_coord_[i] + gg;
  }
  inner_ = beta_ * inner_ + inner;
  sqnorm_ = b2 * sqnorm_ + sq;
  ++t_;
}

namespace {

ParamVector direction_from(std::span<const double> w, double radius,
                           Flavor flavor) {
  std::vector<double> u(w.size(), 0.0);
  if (flavor == Flavor::kL1) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) u[i] = -radius * std::copysign(1.0, w[i]);
    }
    return ParamVector(std::move(u));
  }
  double norm = 0.0;
  for (double v : w) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return ParamVector(std::move(u));
  for (std::size_t i = 0; i < w.size(); ++i) u[i] = -radius * w[i] / norm;
  return ParamVector(std::move(u));
}

}  // namespace

ParamVector comparator_direction(const RegretLedger& ledger, Flavor flavor) {
  return direction_from(ledger.disc_exact_grad_sum(), ledger.radius(), flavor);
}

ParamVector worst_ball_comparator(const RegretLedger& ledger, Flavor flavor) {
  return direction_from(ledger.disc_grad_sum(), ledger.radius(), flavor);
}

double discounted_regret(const RegretLedger& ledger, const ParamVector& u) {
  if (u.dim() != ledger.dim()) throw DimensionError("comparator dimension");
  const auto b = ledger.disc_grad_sum();
  double bu = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) bu += b[i] * u[i];
  return ledger.disc_inner() - bu;
}

double regret_bound_rhs(const RegretLedger& ledger) {
  return 4.0 * ledger.radius() * std::sqrt(ledger.disc_sqnorm());
}

namespace {

bool within_bound(double regret, double bound) {
  return regret <= bound + kRegretSlack * bound;
}

double ratio_of(double regret, double bound) {
  if (bound > 0.0) return regret / bound;
  return regret > 0.0 ? INFINITY : 0.0;
}

}  // namespace

RegretCheck check_regret_bound(const RegretLedger& ledger,
                               bool coordinate_wise) {
  RegretCheck out;
  const double radius = ledger.radius();
  const auto b = ledger.disc_grad_sum();
  if (!coordinate_wise) {
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    // max over ||u|| <= D of a - <b, u> is a + D ||b||.
    out.regret = ledger.disc_inner() + radius * std::sqrt(bnorm);
    out.bound = regret_bound_rhs(ledger);
    out.ratio = ratio_of(out.regret, out.bound);
    out.holds = within_bound(out.regret, out.bound);
    return out;
  }
  const auto a = ledger.disc_inner_coord();
  const auto c = ledger.disc_sqnorm_coord();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double regret = a[i] + radius * std::abs(b[i]);
    const double bound = 4.0 * radius * std::sqrt(c[i]);
    out.regret += regret;
    out.bound += bound;
    out.ratio = std::max(out.ratio, ratio_of(regret, bound));
    out.holds = out.holds && within_bound(regret, bound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stationarity

StationarityAccumulator::StationarityAccumulator(double beta)
    : beta_(beta), grads_(beta), shifted_x_(beta) {}

void StationarityAccumulator::observe(const ParamVector& x,
                                      const ParamVector& exact_grad) {
  require_same_dim(x, exact_grad);
  if (count() == 0) anchor_ = x;
  require_same_dim(anchor_, x);
  std::vector<double> shifted(x.dim());
  double sq = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    shifted[i] = x[i] - anchor_[i];
    sq += shifted[i] * shifted[i];
  }
  grads_.update(exact_grad);
  shifted_x_.update(shifted);
  const double w = shifted_x_.newest_weight();
  sqnorm_ = (1.0 - w) * sqnorm_ + w * sq;
}

ParamVector StationarityAccumulator::x_ema() const {
  const auto m = shifted_x_.raw();
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = anchor_[i] + m[i];
  return ParamVector(std::move(out));
}

double StationarityAccumulator::variance() const {
  double mean_sq = 0.0;
  for (double v : shifted_x_.raw()) mean_sq += v * v;
  const double var = sqnorm_ - mean_sq;
  if (var < -1e-9) {
    throw std::logic_error("stationarity accumulator corrupted: variance " +
                           std::to_string(var));
  }
  return std::max(var, 0.0);
}

StationarityReport stationarity_report(const StationarityAccumulator& acc,
                                       double lambda, Flavor flavor) {
  if (acc.count() == 0) {
    throw std::invalid_argument("stationarity report needs t >= 1");
  }
  StationarityReport r;
  const ParamVector g = acc.grad_ema();
  r.grad_norm = flavor == Flavor::kL1 ? l1_norm(g) : l2_norm(g);
  r.variance = acc.variance();
  r.lambda = lambda;
  r.value = r.grad_norm + lambda * r.variance;
  r.flavor = flavor;
  return r;
}

VarianceCheck variance_bound_check(double mean_variance, double radius,
                                   double beta, std::size_t dim,
                                   bool coordinate_wise) {
  VarianceCheck c;
  const double gap = 1.0 - beta;
  c.lhs = mean_variance;
  c.rhs = 12.0 * radius * radius / (gap * gap);
  if (coordinate_wise) c.rhs *= static_cast<double>(dim);
  c.margin = c.rhs - c.lhs;
  c.holds = c.lhs <= c.rhs;
  return c;
}

// ---------------------------------------------------------------------------
// Theorem calculators

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

TheoremParams size_run(double epsilon, double lambda, double C,
                       double delta_bound, std::size_t dim) {
  require_positive(epsilon, "epsilon");
  require_positive(lambda, "lambda");
  require_positive(C, "C");
  if (!(delta_bound >= 0.0) || !std::isfinite(delta_bound)) {
    throw std::invalid_argument("delta_bound must be nonnegative");
  }
  if (dim == 0) throw std::invalid_argument("d must be >= 1");
  if (epsilon >= 10.0 * C) {
    throw std::domain_error(
        "β out of range: need epsilon < 10 C so that beta lies in (0, 1)");
  }
  // 1 - beta = eps^2 / (100 C^2); forming it directly instead of
  // 1 - (1 - ...) keeps round numbers round.
  const double gap = (epsilon * epsilon) / (100.0 * C * C);
  const double inv_gap = (100.0 * C * C) / (epsilon * epsilon);
  const double root_d = std::sqrt(static_cast<double>(dim));

  TheoremParams p;
  p.beta = 1.0 - gap;
  p.radius = gap * std::sqrt(epsilon) / (4.0 * root_d * std::sqrt(lambda));
  const double progress_term =
      4.0 * delta_bound * root_d * std::sqrt(lambda) / std::pow(epsilon, 1.5);
  const double noise_term = 12.0 * C / epsilon;
  const double horizon = inv_gap * std::max(progress_term, noise_term);
  if (!(horizon < 1.8e19)) throw std::domain_error("T overflows");
  p.T = static_cast<std::uint64_t>(std::ceil(horizon));
  p.C = C;
  p.lambda = lambda;
  p.epsilon = epsilon;
  p.delta_bound = delta_bound;
  p.dim = dim;
  return p;
}

}  // namespace

TheoremParams theorem1_params(double epsilon, double lambda, double C,
                              double delta_bound) {
  return size_run(epsilon, lambda, C, delta_bound, 1);
}

TheoremParams theorem2_params(double epsilon, double lambda, double C,
                              double delta_bound, std::size_t dim) {
  return size_run(epsilon, lambda, C, delta_bound, dim);
}

SmoothConversion convert_smooth(double smoothness, double epsilon) {
  require_positive(smoothness, "L");
  require_positive(epsilon, "epsilon");
  return {smoothness * smoothness / epsilon, 2.0 * epsilon};
}

SmoothConversion convert_second_order(double hessian_lipschitz,
                                      double epsilon) {
  require_positive(hessian_lipschitz, "H");
  require_positive(epsilon, "epsilon");
  return {hessian_lipschitz / 2.0, 2.0 * epsilon};
}

double convert_goldstein(double lipschitz, double lambda, double delta,
                         double epsilon) {
  if (lipschitz < 0.0) throw std::invalid_argument("G must be nonnegative");
  require_positive(lambda, "lambda");
  require_positive(delta, "delta");
  require_positive(epsilon, "epsilon");
  return (1.0 + 2.0 * lipschitz / (lambda * delta * delta)) * epsilon;
}

std::pair<double, double> l1_l2_reduction(double lambda, double epsilon,
                                          std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("d must be >= 1");
  const double root_d = std::sqrt(static_cast<double>(dim));
  return {lambda / root_d, epsilon / root_d};
}

ComplexityReport complexity_tables(double lipschitz, double noise,
                                   double delta_bound, double lambda,
                                   double epsilon, std::size_t dim,
                                   const ParamVector& lipschitz_vec,
                                   const ParamVector& noise_vec) {
  require_positive(lambda, "lambda");
  require_positive(epsilon, "epsilon");
  if (dim == 0) throw std::invalid_argument("d must be >= 1");
  require_same_dim(lipschitz_vec, noise_vec);
  if (lipschitz_vec.dim() != dim) throw DimensionError("G_vec length != d");

  const ParamVector total = add(lipschitz_vec, noise_vec);
  const double c2 = lipschitz + noise;
  const double d = static_cast<double>(dim);
  const double lam = std::sqrt(lambda);
  const double eps35 = std::pow(epsilon, 3.5);
  const double eps3 = epsilon * epsilon * epsilon;

  ComplexityReport r;
  r.sum_l1 = l1_norm(total);
  r.sum_l2 = l2_norm(total);
  r.l2_complexity = std::max(c2 * c2 * delta_bound * lam / eps35,
                             c2 * c2 * c2 / eps3);
  r.l1_complexity =
      std::max(r.sum_l1 * r.sum_l1 * delta_bound * std::sqrt(d) * lam / eps35,
               r.sum_l1 * r.sum_l1 * r.sum_l1 / eps3);
  r.coordinate_rate =
      r.sum_l1 * r.sum_l1 * delta_bound * std::sqrt(d) * lam / eps35;
  r.global_rate =
      r.sum_l2 * r.sum_l2 * delta_bound * std::pow(d, 1.5) * lam / eps35;
  r.ratio = (r.sum_l1 * r.sum_l1) / (r.sum_l2 * r.sum_l2 * d);
  return r;
}

// ---------------------------------------------------------------------------
// Run monitor

RunMonitor::RunMonitor(const ProblemSpec& problem, const LearnerConfig& learner,
                       double beta, double lambda, Flavor flavor,
                       std::optional<double> threshold)
    : problem_(&problem),
      learner_(learner),
      lambda_(lambda),
      flavor_(flavor),
      threshold_(threshold),
      ledger_(learner.effective_beta(), learner.radius, problem.dim),
      stationarity_(beta),
      prev_x_bar_(problem.x0) {}

RunRecord RunMonitor::observe(const StepOutcome& step) {
  const ParamVector grad = exact_grad(*problem_, step.x);
  ledger_.observe(step.g, step.z, grad);
  stationarity_.observe(step.x, grad);
  ++t_;

  const bool coordinate_wise = is_coordinate_wise(learner_.mode);
  const double z_size = coordinate_wise ? linf_norm(step.z) : l2_norm(step.z);
  if (z_size > learner_.radius) increments_bounded_ = false;

  const RegretCheck regret = check_regret_bound(ledger_, coordinate_wise);
  if (is_ftrl_family(learner_.mode)) {
    max_ratio_ = std::max(max_ratio_, regret.ratio);
    regret_holds_ = regret_holds_ && regret.holds;
  }

  last_ = stationarity_report(stationarity_, lambda_, flavor_);
  value_sum_ += last_.value;
  variance_sum_ += last_.variance;
  if (threshold_ && !first_below_ &&
      value_sum_ / static_cast<double>(t_) <= *threshold_) {
    first_below_ = t_;
  }

  RunRecord rec;
  rec.t = step.t;
  rec.alpha_t = step.alpha;
  rec.z_norm = l2_norm(step.z);
  rec.grad_norm_exact = l2_norm(grad);
  rec.regret = regret.regret;
  rec.regret_bound = regret.bound;
  rec.stationarity_value = last_.value;
  rec.ema_drift = l2_norm(sub(step.x_bar, prev_x_bar_));
  prev_x_bar_ = step.x_bar;
  return rec;
}

RunSummary RunMonitor::finish() const {
  RunSummary s;
  s.T = t_;
  if (t_ == 0) return s;
  const double n = static_cast<double>(t_);
  s.t_avg_stationarity = value_sum_ / n;
  s.final_report = last_;
  s.regret_checked = is_ftrl_family(learner_.mode);
  s.max_regret_ratio = max_ratio_;
  s.regret_holds = regret_holds_;
  s.increments_bounded = increments_bounded_;
  s.variance = variance_bound_check(variance_sum_ / n, learner_.radius,
                                    stationarity_.beta(), problem_->dim,
                                    is_coordinate_wise(learner_.mode));
  const Flavor comp = is_coordinate_wise(learner_.mode) ? Flavor::kL1
                                                        : Flavor::kL2;
  s.oracle_regret =
      discounted_regret(ledger_, comparator_direction(ledger_, comp));
  s.first_below_threshold = first_below_;
  return s;
}

}  // namespace o2nc
