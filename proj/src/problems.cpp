#include "o2nc/problems.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace o2nc {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kHuberValley: return "HUBER_VALLEY";
    case ProblemKind::kBoundedWave: return "BOUNDED_WAVE";
    case ProblemKind::kHeteroMix: return "HETERO_MIX";
  }
  return "UNKNOWN";
}

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "HUBER_VALLEY") return ProblemKind::kHuberValley;
  if (name == "BOUNDED_WAVE") return ProblemKind::kBoundedWave;
  if (name == "HETERO_MIX") return ProblemKind::kHeteroMix;
  throw std::invalid_argument("unknown problem: " + std::string(name));
}

namespace {

void check_shapes(const ProblemSpec& p) {
  if (p.dim == 0) throw std::invalid_argument("problem dimension must be >= 1");
  if (p.lipschitz.dim() != p.dim || p.noise.dim() != p.dim ||
      p.x0.dim() != p.dim) {
    throw DimensionError("problem constants must match the dimension");
  }
  for (double g : p.lipschitz.values()) {
    if (!(g > 0.0)) throw std::invalid_argument("G_i must be positive");
  }
  for (double s : p.noise.values()) {
    if (s < 0.0) throw std::invalid_argument("sigma_i must be nonnegative");
  }
}

double huber(double u, double width) {
  const double a = std::abs(u);
  return a <= width ? 0.5 * u * u / width : a - 0.5 * width;
}

double huber_slope(double u, double width) {
  return std::abs(u) <= width ? u / width : std::copysign(1.0, u);
}

double wave(double u) { return u * u / (1.0 + u * u); }

double wave_slope(double u) {
  const double q = 1.0 + u * u;
  return 2.0 * u / (q * q);
}

}  // namespace

ProblemSpec make_huber_valley(ParamVector lipschitz, ParamVector noise,
                              ParamVector x0, double huber_width) {
  if (!(huber_width > 0.0)) {
    throw std::invalid_argument("huber_width must be positive");
  }
  ProblemSpec p;
  p.kind = ProblemKind::kHuberValley;
  p.dim = x0.dim();
  p.lipschitz = std::move(lipschitz);
  p.noise = std::move(noise);
  p.x0 = std::move(x0);
  p.huber_width = huber_width;
  check_shapes(p);
  // inf F = 0 at the origin.
  p.delta_bound = eval_f(p, p.x0);
  return p;
}

ProblemSpec make_bounded_wave(ParamVector lipschitz, ParamVector noise,
                              ParamVector x0) {
  ProblemSpec p;
  p.kind = ProblemKind::kBoundedWave;
  p.dim = x0.dim();
  p.lipschitz = std::move(lipschitz);
  p.noise = std::move(noise);
  p.x0 = std::move(x0);
  check_shapes(p);
  p.delta_bound = eval_f(p, p.x0);
  return p;
}

ProblemSpec make_hetero_mix(std::size_t dim, double heavy, double noise_scale,
                            ParamVector x0) {
  if (dim == 0) throw std::invalid_argument("problem dimension must be >= 1");
  if (!(heavy > 0.0)) throw std::invalid_argument("H must be positive");
  if (noise_scale < 0.0) throw std::invalid_argument("s must be nonnegative");
  std::vector<double> g(dim, 1.0);
  std::vector<double> s(dim, noise_scale);
  g[0] = heavy;
  s[0] = heavy * noise_scale;
  ProblemSpec p = make_bounded_wave(ParamVector(std::move(g)),
                                    ParamVector(std::move(s)), std::move(x0));
  p.kind = ProblemKind::kHeteroMix;
  return p;
}

namespace {

double scalar_param(const ProblemParams& params, const std::string& key,
                    double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) {
    throw std::invalid_argument("problem parameter '" + key +
                                "' must be a scalar");
  }
  return it->second.front();
}

ParamVector vector_param(const ProblemParams& params, const std::string& key,
                         std::size_t dim, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return ParamVector::filled(dim, fallback);
  if (it->second.size() == 1) return ParamVector::filled(dim, it->second[0]);
  if (it->second.size() != dim) {
    throw DimensionError("problem parameter '" + key + "' has length " +
                         std::to_string(it->second.size()) + ", expected " +
                         std::to_string(dim));
  }
  return ParamVector(it->second);
}

}  // namespace

ProblemSpec make_problem(std::string_view name, const ProblemParams& params) {
  const ProblemKind kind = parse_problem_kind(name);

  std::set<std::string> allowed = {"d", "x0"};
  switch (kind) {
    case ProblemKind::kHuberValley:
      allowed.insert({"G", "sigma", "huber_width"});
      break;
    case ProblemKind::kBoundedWave:
      allowed.insert({"G", "sigma"});
      break;
    case ProblemKind::kHeteroMix:
      allowed.insert({"H", "s"});
      break;
  }
  for (const auto& [key, _] : params) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("unknown parameter '" + key +
                                  "' for problem " + std::string(name));
    }
  }

  const double d_raw = scalar_param(params, "d", 1.0);
  if (!(d_raw >= 1.0) || d_raw != std::floor(d_raw)) {
    throw std::invalid_argument("problem parameter 'd' must be a positive integer");
  }
  const auto dim = static_cast<std::size_t>(d_raw);
  ParamVector x0 = vector_param(params, "x0", dim, 1.0);

  switch (kind) {
    case ProblemKind::kHuberValley:
      return make_huber_valley(vector_param(params, "G", dim, 1.0),
                               vector_param(params, "sigma", dim, 0.0),
                               std::move(x0),
                               scalar_param(params, "huber_width", 0.1));
    case ProblemKind::kBoundedWave:
      return make_bounded_wave(vector_param(params, "G", dim, 1.0),
                               vector_param(params, "sigma", dim, 0.0),
                               std::move(x0));
    case ProblemKind::kHeteroMix:
      return make_hetero_mix(dim, scalar_param(params, "H", 100.0),
                             scalar_param(params, "s", 0.0), std::move(x0));
  }
  throw std::logic_error("unhandled problem kind");
}

double eval_f(const ProblemSpec& problem, const ParamVector& x) {
  require_same_dim(problem.x0, x);
  double f = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double g = problem.lipschitz[i];
    if (problem.kind == ProblemKind::kHuberValley) {
      f += g * huber(x[i], problem.huber_width);
    } else {
      f += (g / kWaveSlopeMax) * wave(x[i]);
    }
  }
  return f;
}

ParamVector exact_grad(const ProblemSpec& problem, const ParamVector& x) {
  require_same_dim(problem.x0, x);
  std::vector<double> grad(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double g = problem.lipschitz[i];
    double slope = problem.kind == ProblemKind::kHuberValley
                       ? g * huber_slope(x[i], problem.huber_width)
                       : (g / kWaveSlopeMax) * wave_slope(x[i]);
    // |slope| <= G_i analytically; the clamp absorbs last-ulp rounding at
    // the wave's inflection point.
    grad[i] = std::clamp(slope, -g, g);
  }
  return ParamVector(std::move(grad));
}

OracleSample sto_grad(const ProblemSpec& problem, const ParamVector& x,
                      RandomStream& stream) {
  const ParamVector grad = exact_grad(problem, x);
  OracleSample sample;
  sample.tag = stream.counter();
  std::vector<double> g(grad.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = grad[i] + problem.noise[i] * sample_sign(stream);
  }
  sample.g = ParamVector(std::move(g));
  return sample;
}

}  // namespace o2nc
