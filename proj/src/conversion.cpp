#include "o2nc/conversion.hpp"

#include <cmath>
#include <string>

namespace o2nc {

EmaTracker::EmaTracker(double beta) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("EMA beta must lie in (0, 1)");
  }
}

void EmaTracker::update(std::span<const double> x) {
  if (t_ == 0) {
    mean_.assign(x.size(), 0.0);
  } else if (x.size() != mean_.size()) {
    throw DimensionError("EMA input dimension changed");
  }
  ++t_;
  beta_pow_ *= beta_;
  const double denom = 1.0 - beta_pow_;
  const double keep = (beta_ - beta_pow_) / denom;
  newest_weight_ = (1.0 - beta_) / denom;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_[i] = keep * mean_[i] + newest_weight_ * x[i];
  }
}

std::vector<double> ema_weights(std::uint64_t t, double beta) {
  if (t == 0) throw std::invalid_argument("ema_weights needs t >= 1");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("EMA beta must lie in (0, 1)");
  }
  const double norm = (1.0 - beta) / (1.0 - std::pow(beta, double(t)));
  std::vector<double> w(t);
  for (std::uint64_t s = 1; s <= t; ++s) {
    w[s - 1] = std::pow(beta, double(t - s)) * norm;
  }
  return w;
}

ParamVector ema_closed_form(const std::vector<ParamVector>& xs, double beta) {
  if (xs.empty()) throw std::invalid_argument("ema_closed_form: empty list");
  const auto w = ema_weights(xs.size(), beta);
  std::vector<double> acc(xs.front().dim(), 0.0);
  for (std::size_t s = 0; s < xs.size(); ++s) {
    require_same_dim(xs.front(), xs[s]);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w[s] * xs[s][i];
  }
  return ParamVector(std::move(acc));
}

ConversionError::ConversionError(std::uint64_t step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what),
      step_(step) {}

void run_conversion(const ParamVector& x0, std::uint64_t T,
                    const LearnerConfig& learner, const ProblemSpec& problem,
                    double beta, const RandomStream& stream,
                    const StepSink& sink) {
  if (T == 0) throw std::invalid_argument("T must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("conversion beta must lie in (0, 1)");
  }
  if (learner.mode != LearnerMode::kScaleFreeFtrl && learner.beta != beta) {
    throw std::invalid_argument(
        "learner discount must match the conversion beta");
  }
  if (x0.dim() != problem.dim) {
    throw DimensionError("x0 does not match the problem dimension");
  }

  OnlineLearner alg(learner, x0.dim());
  EmaTracker ema(beta);
  RandomStream alpha_stream = stream.substream(kAlphaSubstream);
  RandomStream oracle_stream = stream.substream(kOracleSubstream);

  StepOutcome out;
  out.x = x0;
  for (std::uint64_t t = 1; t <= T; ++t) {
    out.t = t;
    try {
      out.z = alg.increment();
      out.alpha = sample_exp1(alpha_stream);
      out.x = axpy(out.alpha, out.z, out.x);
      out.g = sto_grad(problem, out.x, oracle_stream).g;
      alg.observe(out.g);
    } catch (const DivergenceError& e) {
      throw ConversionError(t, e.what());
    } catch (const NonFiniteError& e) {
      throw ConversionError(t, e.what());
    }
    ema.update(out.x);
    out.x_bar = ema.value();
    if (sink) sink(out);
  }
}

std::vector<StepOutcome> run_conversion(const ParamVector& x0, std::uint64_t T,
                                        const LearnerConfig& learner,
                                        const ProblemSpec& problem, double beta,
                                        const RandomStream& stream) {
  std::vector<StepOutcome> steps;
  steps.reserve(T);
  run_conversion(x0, T, learner, problem, beta, stream,
                 [&](const StepOutcome& s) { steps.push_back(s); });
  return steps;
}

}  // namespace o2nc
