#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "o2nc/learners.hpp"
#include "o2nc/numerics.hpp"
#include "o2nc/problems.hpp"

namespace o2nc {

/// Normalized geometric average of a stream of points,
///   xbar_t = (beta - beta^t)/(1 - beta^t) * xbar_{t-1}
///          + (1 - beta)/(1 - beta^t) * x_t,
/// which after step 1 is exactly x_1.
class EmaTracker {
 public:
  EmaTracker() = default;
  explicit EmaTracker(double beta);

  void update(std::span<const double> x);
  void update(const ParamVector& x) { update(x.values()); }

  std::uint64_t count() const noexcept { return t_; }
  double beta() const noexcept { return beta_; }
  /// beta^t for the current count.
  double beta_power() const noexcept { return beta_pow_; }
  /// Weight (1 - beta)/(1 - beta^t) given to the newest point.
  double newest_weight() const noexcept { return newest_weight_; }
  std::span<const double> raw() const noexcept { return mean_; }
  ParamVector value() const { return ParamVector(mean_); }

 private:
  double beta_ = 0.5;
  double beta_pow_ = 1.0;
  double newest_weight_ = 1.0;
  std::uint64_t t_ = 0;
  std::vector<double> mean_;
};

/// P(y_t = x_s) = beta^{t-s} (1 - beta)/(1 - beta^t), s = 1..t.
std::vector<double> ema_weights(std::uint64_t t, double beta);

/// (1 - beta)/(1 - beta^t) * sum_s beta^{t-s} x_s. Throws on an empty list.
ParamVector ema_closed_form(const std::vector<ParamVector>& xs, double beta);

struct StepOutcome {
  std::uint64_t t = 0;
  double alpha = 0.0;
  ParamVector z;
  ParamVector g;
  ParamVector x;
  ParamVector x_bar;
};

using StepSink = std::function<void(const StepOutcome&)>;

/// Raised when a run cannot continue; `step()` is the failing round.
class ConversionError : public std::runtime_error {
 public:
  ConversionError(std::uint64_t step, const std::string& what);
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

/// Substream ids carved out of the run seed.
inline constexpr std::uint64_t kAlphaSubstream = 1;
inline constexpr std::uint64_t kOracleSubstream = 2;

/// Runs T rounds of the discounted-to-nonconvex conversion:
///   z_t from the learner, x_t = x_{t-1} + alpha_t z_t with alpha_t ~ Exp(1),
///   g_t = StoGrad(x_t), learner observes g_t, EMA absorbs x_t.
/// Scaling and oracle noise use independent substreams of `stream`.
/// beta must be in (0, 1); the learner's discount must equal beta unless
/// it is SCALE_FREE_FTRL.
void run_conversion(const ParamVector& x0, std::uint64_t T,
                    const LearnerConfig& learner, const ProblemSpec& problem,
                    double beta, const RandomStream& stream,
                    const StepSink& sink);

/// Convenience overload keeping the whole trajectory.
std::vector<StepOutcome> run_conversion(const ParamVector& x0, std::uint64_t T,
                                        const LearnerConfig& learner,
                                        const ProblemSpec& problem, double beta,
                                        const RandomStream& stream);

}  // namespace o2nc
