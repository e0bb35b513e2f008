#include "o2nc/learners.hpp"

#include <cmath>

namespace o2nc {

std::string to_string(LearnerMode mode) {
  switch (mode) {
    case LearnerMode::kScaleFreeFtrl: return "SCALE_FREE_FTRL";
    case LearnerMode::kBetaFtrl: return "BETA_FTRL";
    case LearnerMode::kClippedAdam: return "CLIPPED_ADAM";
    case LearnerMode::kDiscountedOgd: return "DISCOUNTED_OGD";
  }
  return "UNKNOWN";
}

LearnerMode parse_learner_mode(std::string_view name) {
  if (name == "SCALE_FREE_FTRL") return LearnerMode::kScaleFreeFtrl;
  if (name == "BETA_FTRL") return LearnerMode::kBetaFtrl;
  if (name == "CLIPPED_ADAM") return LearnerMode::kClippedAdam;
  if (name == "DISCOUNTED_OGD") return LearnerMode::kDiscountedOgd;
  throw std::invalid_argument("unknown learner mode: " + std::string(name));
}

bool is_coordinate_wise(LearnerMode mode) {
  return mode == LearnerMode::kClippedAdam;
}

bool is_ftrl_family(LearnerMode mode) {
  return mode != LearnerMode::kDiscountedOgd;
}

void LearnerConfig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("learner radius D must be positive");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("learner beta must lie in (0, 1]");
  }
  if (mode == LearnerMode::kDiscountedOgd &&
      (!(eta > 0.0) || !std::isfinite(eta))) {
    throw std::invalid_argument("DISCOUNTED_OGD needs a positive eta");
  }
}

double LearnerConfig::effective_beta() const noexcept {
  return mode == LearnerMode::kScaleFreeFtrl ? 1.0 : beta;
}

LearnerState LearnerState::initial(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("learner dimension must be >= 1");
  LearnerState s;
  s.m = ParamVector::zeros(dim);
  s.v_coord = ParamVector::zeros(dim);
  return s;
}

namespace {

void require_healthy(const LearnerState& state) {
  if (!std::isfinite(state.v_total) || state.v_total < 0.0) {
    throw DivergenceError("diverged state");
  }
}

ParamVector global_ftrl_increment(const LearnerState& state, double radius) {
  if (state.v_total == 0.0) return ParamVector::zeros(state.dim());
  // Same operation order as the per-coordinate rule, so that d = 1 and the
  // coordinate-wise learner agree bit for bit.
  const double root = std::sqrt(state.v_total);
  std::vector<double> raw(state.dim());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = radius * state.m[i] / root;
  }
  return scale(-1.0, clip(ParamVector(std::move(raw)), radius));
}

ParamVector coordinate_ftrl_increment(const LearnerState& state,
                                      double radius) {
  std::vector<double> z(state.dim(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = state.v_coord[i];
    if (v == 0.0) continue;
    z[i] = -clip_scalar(radius * state.m[i] / std::sqrt(v), radius);
  }
  return ParamVector(std::move(z));
}

}  // namespace

ParamVector next_increment(const LearnerState& state,
                           const LearnerConfig& config) {
  require_healthy(state);
  switch (config.mode) {
    case LearnerMode::kScaleFreeFtrl:
    case LearnerMode::kBetaFtrl:
      return global_ftrl_increment(state, config.radius);
    case LearnerMode::kClippedAdam:
      return coordinate_ftrl_increment(state, config.radius);
    case LearnerMode::kDiscountedOgd:
      return scale(-1.0, clip(scale(config.eta, state.m), config.radius));
  }
  throw std::logic_error("unhandled learner mode");
}

LearnerState observe_gradient(LearnerState state, const ParamVector& g,
                              const LearnerConfig& config) {
  require_same_dim(state.m, g);
  const double beta = config.effective_beta();
  const double beta2 = beta * beta;
  const std::size_t d = g.dim();

  std::vector<double> m(d);
  std::vector<double> v(d);
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    m[i] = beta * state.m[i] + g[i];
    v[i] = beta2 * state.v_coord[i] + g[i] * g[i];
    sq += g[i] * g[i];
  }
  const double v_total = beta2 * state.v_total + sq;

  try {
    state.m = ParamVector(std::move(m));
    state.v_coord = ParamVector(std::move(v));
  } catch (const NonFiniteError&) {
    throw DivergenceError("diverged state");
  }
  if (!std::isfinite(v_total)) throw DivergenceError("diverged state");
  state.v_total = v_total;
  ++state.t;
  return state;
}

OnlineLearner::OnlineLearner(LearnerConfig config, std::size_t dim)
    : config_(config), state_(LearnerState::initial(dim)) {
  config_.validate();
}

}  // namespace o2nc
