#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "o2nc/numerics.hpp"

namespace o2nc {

enum class LearnerMode {
  kScaleFreeFtrl,
  kBetaFtrl,
  kClippedAdam,
  kDiscountedOgd,
};

std::string to_string(LearnerMode mode);
/// Accepts the upper-case config spellings (SCALE_FREE_FTRL, BETA_FTRL,
/// CLIPPED_ADAM, DISCOUNTED_OGD).
LearnerMode parse_learner_mode(std::string_view name);

/// True for modes whose increments are bounded coordinate-wise rather than
/// in the Euclidean ball.
bool is_coordinate_wise(LearnerMode mode);

/// True for the scale-free FTRL family covered by the discounted regret bound.
bool is_ftrl_family(LearnerMode mode);

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LearnerConfig {
  LearnerMode mode = LearnerMode::kBetaFtrl;
  double radius = 1.0;  // D
  double beta = 1.0;
  double eta = 0.0;  // DISCOUNTED_OGD only

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  /// Discount actually applied; SCALE_FREE_FTRL always runs undiscounted.
  double effective_beta() const noexcept;
};

/// Discounted accumulators of one learner.
///
///   m_t = beta * m_{t-1} + g_t
///   v_t = beta^2 * v_{t-1} + ||g_t||^2      (global modes, `v_total`)
///   v_t[i] = beta^2 * v_{t-1}[i] + g_t[i]^2 (CLIPPED_ADAM, `v_coord`)
///
/// These are the beta^{-s}-weighted sums of the FTRL update multiplied by
/// beta^t, so their ratio m / sqrt(v) is the same without ever forming
/// beta^{-t}.
struct LearnerState {
  ParamVector m;
  double v_total = 0.0;
  ParamVector v_coord;
  std::uint64_t t = 0;

  static LearnerState initial(std::size_t dim);
  std::size_t dim() const noexcept { return m.dim(); }
};

/// Increment z for the next round given everything observed so far.
ParamVector next_increment(const LearnerState& state,
                           const LearnerConfig& config);

/// Folds gradient g into the accumulators.
LearnerState observe_gradient(LearnerState state, const ParamVector& g,
                              const LearnerConfig& config);

/// Config plus state, for callers that just want to play the online game.
class OnlineLearner {
 public:
  OnlineLearner(LearnerConfig config, std::size_t dim);

  ParamVector increment() const { return next_increment(state_, config_); }
  void observe(const ParamVector& g) {
    // Copy so a rejected gradient leaves the learner untouched.
    state_ = observe_gradient(state_, g, config_);
  }

  const LearnerConfig& config() const noexcept { return config_; }
  const LearnerState& state() const noexcept { return state_; }

 private:
  LearnerConfig config_;
  LearnerState state_;
};

}  // namespace o2nc
