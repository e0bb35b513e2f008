#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "o2nc/conversion.hpp"
#include "o2nc/learners.hpp"
#include "o2nc/numerics.hpp"
#include "o2nc/problems.hpp"

namespace o2nc {

/// Norm used for the gradient part of the regularized stationarity measure.
enum class Flavor { kL2, kL1 };

std::string to_string(Flavor flavor);
Flavor parse_flavor(std::string_view name);

/// Discounted regret bookkeeping for one learner.
///
/// All sums are kept in the beta^T-scaled form so no beta^{-t} is formed:
///   a_t = beta a_{t-1} + <g_t, z_t>        (disc_inner)
///   b_t = beta b_{t-1} + g_t               (disc_grad_sum)
///   c_t = beta^2 c_{t-1} + ||g_t||^2       (disc_sqnorm)
///   w_t = beta w_{t-1} + grad F(x_t)       (disc_exact_grad_sum)
/// plus the per-coordinate a_t[i], c_t[i] used by the coordinate-wise
/// bound. R_T(u) = a_T - <b_T, u>.
class RegretLedger {
 public:
  RegretLedger() = default;
  RegretLedger(double beta, double radius, std::size_t dim);

  void observe(const ParamVector& g, const ParamVector& z);
  void observe(const ParamVector& g, const ParamVector& z,
               const ParamVector& exact_grad);

  double beta() const noexcept { return beta_; }
  double radius() const noexcept { return radius_; }
  std::size_t dim() const noexcept { return grad_sum_.size(); }
  std::uint64_t count() const noexcept { return t_; }

  double disc_inner() const noexcept { return inner_; }
  double disc_sqnorm() const noexcept { return sqnorm_; }
  std::span<const double> disc_grad_sum() const noexcept { return grad_sum_; }
  std::span<const double> disc_exact_grad_sum() const noexcept {
    return exact_sum_;
  }
  std::span<const double> disc_inner_coord() const noexcept {
    return inner_coord_;
  }
  std::span<const double> disc_sqnorm_coord() const noexcept {
    return sqnorm_coord_;
  }

 private:
  double beta_ = 1.0;
  double radius_ = 1.0;
  std::uint64_t t_ = 0;
  double inner_ = 0.0;
  double sqnorm_ = 0.0;
  std::vector<double> grad_sum_;
  std::vector<double> exact_sum_;
  std::vector<double> inner_coord_;
  std::vector<double> sqnorm_coord_;
};

/// Oracle comparator built from the discounted exact-gradient sum w:
/// L2 gives -D w/||w|| (zero when w = 0), L1 gives -D sign(w[i]).
ParamVector comparator_direction(const RegretLedger& ledger, Flavor flavor);

/// The comparator in the D-ball (L2) or D-box (L1) that maximizes R_T(u),
/// i.e. the same construction applied to the stochastic sum b_T.
ParamVector worst_ball_comparator(const RegretLedger& ledger, Flavor flavor);

double discounted_regret(const RegretLedger& ledger, const ParamVector& u);

/// 4 D sqrt(c_T).
double regret_bound_rhs(const RegretLedger& ledger);

struct RegretCheck {
  double regret = 0.0;  // against the worst comparator
  double bound = 0.0;
  double ratio = 0.0;   // max regret/bound (per coordinate when coordinate-wise)
  bool holds = true;
};

/// Relative slack allowed on top of the bound for rounding.
inline constexpr double kRegretSlack = 1e-9;

/// Checks the discounted regret bound against the worst comparator. With
/// `coordinate_wise` each coordinate is checked against its own 1-D bound
/// 4 D sqrt(c_T[i]) and the totals are summed.
RegretCheck check_regret_bound(const RegretLedger& ledger,
                               bool coordinate_wise);

struct StationarityReport {
  double grad_norm = 0.0;
  double variance = 0.0;
  double lambda = 0.0;
  double value = 0.0;
  Flavor flavor = Flavor::kL2;
};

/// Streams the law of y_t (weights beta^{t-s}(1-beta)/(1-beta^t) on x_s)
/// and evaluates the witness ||E grad F(y_t)|| + lambda E||y_t - xbar_t||^2.
///
/// Second moments are taken about the first observed point to keep the
/// E||y||^2 - ||E y||^2 difference well conditioned.
class StationarityAccumulator {
 public:
  StationarityAccumulator() = default;
  explicit StationarityAccumulator(double beta);

  void observe(const ParamVector& x, const ParamVector& exact_grad);

  std::uint64_t count() const noexcept { return grads_.count(); }
  double beta() const noexcept { return beta_; }
  ParamVector grad_ema() const { return grads_.value(); }
  ParamVector x_ema() const;
  /// E||y_t - anchor||^2
  double x_sqnorm_ema() const noexcept { return sqnorm_; }
  const ParamVector& anchor() const noexcept { return anchor_; }

  /// E||y_t - xbar_t||^2. Throws std::logic_error if the streamed value is
  /// below -1e-9; tiny negatives are clamped to zero.
  double variance() const;

 private:
  double beta_ = 0.5;
  EmaTracker grads_;
  EmaTracker shifted_x_;
  double sqnorm_ = 0.0;
  ParamVector anchor_;
};

StationarityReport stationarity_report(const StationarityAccumulator& acc,
                                       double lambda, Flavor flavor);

struct VarianceCheck {
  double lhs = 0.0;  // E_t E||y_t - xbar_t||^2
  double rhs = 0.0;  // 12 D^2/(1-beta)^2, times d coordinate-wise
  double margin = 0.0;
  bool holds = true;
};

VarianceCheck variance_bound_check(double mean_variance, double radius,
                                   double beta, std::size_t dim,
                                   bool coordinate_wise);

struct TheoremParams {
  double beta = 0.0;
  double radius = 0.0;  // D
  std::uint64_t T = 0;
  double C = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double delta_bound = 0.0;
  std::size_t dim = 1;
};

/// beta = 1 - (eps/(10C))^2, D = (1-beta) eps^{1/2} / (4 lambda^{1/2}),
/// T = ceil(1/(1-beta) * max{4 Delta lambda^{1/2}/eps^{3/2}, 12C/eps}).
/// Throws std::domain_error("beta out of range") when eps >= 10C.
TheoremParams theorem1_params(double epsilon, double lambda, double C,
                              double delta_bound);

/// Coordinate-wise sizing: D and the first T term pick up d^{1/2} factors.
TheoremParams theorem2_params(double epsilon, double lambda, double C,
                              double delta_bound, std::size_t dim);

struct SmoothConversion {
  double lambda = 0.0;
  double guarantee = 0.0;  // bound on ||grad F(x)||
};

/// L-smooth: a (L^2/eps, eps)-stationary point has ||grad F|| <= 2 eps.
SmoothConversion convert_smooth(double smoothness, double epsilon);
/// H-second-order-smooth: a (H/2, eps)-stationary point has ||grad F|| <= 2 eps.
SmoothConversion convert_second_order(double hessian_lipschitz, double epsilon);

/// (lambda, eps)-stationary => (delta, eps')-Goldstein stationary with
/// eps' = (1 + 2G/(lambda delta^2)) eps.
double convert_goldstein(double lipschitz, double lambda, double delta,
                         double epsilon);

/// A (lambda/sqrt(d), eps/sqrt(d))-stationary point is (lambda, eps)-L1
/// stationary. Returns that scaled pair.
std::pair<double, double> l1_l2_reduction(double lambda, double epsilon,
                                          std::size_t dim);

struct ComplexityReport {
  double l2_complexity = 0.0;  // C = G + sigma
  double l1_complexity = 0.0;  // C = ||G_vec + sigma_vec||_1
  double coordinate_rate = 0.0;  // ||G+s||_1^2 Delta d^{1/2} lambda^{1/2} eps^{-7/2}
  double global_rate = 0.0;      // ||G+s||_2^2 Delta d^{3/2} lambda^{1/2} eps^{-7/2}
  double ratio = 0.0;            // coordinate_rate / global_rate
  double sum_l1 = 0.0;
  double sum_l2 = 0.0;
};

/// Bare max{.,.} iteration-complexity expressions (no hidden constants).
ComplexityReport complexity_tables(double lipschitz, double noise,
                                   double delta_bound, double lambda,
                                   double epsilon, std::size_t dim,
                                   const ParamVector& lipschitz_vec,
                                   const ParamVector& noise_vec);

/// One CSV row per step.
struct RunRecord {
  std::uint64_t t = 0;
  double alpha_t = 0.0;
  double z_norm = 0.0;
  double grad_norm_exact = 0.0;
  double regret = 0.0;
  double regret_bound = 0.0;
  double stationarity_value = 0.0;
  double ema_drift = 0.0;
};

struct RunSummary {
  std::uint64_t T = 0;
  double t_avg_stationarity = 0.0;
  StationarityReport final_report;
  double max_regret_ratio = 0.0;
  bool regret_checked = false;
  bool regret_holds = true;
  bool increments_bounded = true;
  VarianceCheck variance;
  /// R_T against the oracle comparator u_T (diagnostic).
  double oracle_regret = 0.0;
  /// First t where the running mean of the witness is <= threshold.
  std::optional<std::uint64_t> first_below_threshold;

  bool bound_violation() const {
    return !regret_holds || !increments_bounded || !variance.holds;
  }
};

/// Everything measured about one conversion run, fed step by step.
class RunMonitor {
 public:
  RunMonitor(const ProblemSpec& problem, const LearnerConfig& learner,
             double beta, double lambda, Flavor flavor,
             std::optional<double> threshold = std::nullopt);

  RunRecord observe(const StepOutcome& step);
  RunSummary finish() const;

  const RegretLedger& ledger() const noexcept { return ledger_; }
  const StationarityAccumulator& stationarity() const noexcept {
    return stationarity_;
  }

 private:
  const ProblemSpec* problem_;
  LearnerConfig learner_;
  double lambda_;
  Flavor flavor_;
  std::optional<double> threshold_;

  RegretLedger ledger_;
  StationarityAccumulator stationarity_;
  ParamVector prev_x_bar_;
  std::uint64_t t_ = 0;
  double value_sum_ = 0.0;
  double variance_sum_ = 0.0;
  double max_ratio_ = 0.0;
  bool regret_holds_ = true;
  bool increments_bounded_ = true;
  StationarityReport last_;
  std::optional<std::uint64_t> first_below_;
};

}  // namespace o2nc
