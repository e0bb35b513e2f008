#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "o2nc/numerics.hpp"

namespace o2nc {

enum class ProblemKind { kHuberValley, kBoundedWave, kHeteroMix };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view name);

/// Normalizer of the bounded wave: max |d/du u^2/(1+u^2)| = 3*sqrt(3)/8,
/// attained at u = 1/sqrt(3).
inline constexpr double kWaveSlopeMax = 3.0 * std::numbers::sqrt3 / 8.0;

/// A synthetic objective with certified constants.
///
/// `lipschitz` holds the per-coordinate bounds G_i on |dF/dx_i| and `noise`
/// the per-coordinate noise scales sigma_i of the stochastic oracle.
/// `delta_bound` is an upper bound on F(x0) - inf F.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::kBoundedWave;
  std::size_t dim = 0;
  ParamVector lipschitz;
  ParamVector noise;
  double delta_bound = 0.0;
  ParamVector x0;
  double huber_width = 0.1;  // HUBER_VALLEY only

  std::string name() const { return to_string(kind); }
  /// G = ||G_vec||_2
  double global_lipschitz() const { return l2_norm(lipschitz); }
  /// sigma = ||sigma_vec||_2
  double global_noise() const { return l2_norm(noise); }
};

ProblemSpec make_huber_valley(ParamVector lipschitz, ParamVector noise,
                              ParamVector x0, double huber_width = 0.1);
ProblemSpec make_bounded_wave(ParamVector lipschitz, ParamVector noise,
                              ParamVector x0);
/// Bounded wave with G = (H, 1, ..., 1) and sigma = (H*s, s, ..., s).
ProblemSpec make_hetero_mix(std::size_t dim, double heavy, double noise_scale,
                            ParamVector x0);

/// Named parameters from a config file. Scalars are stored as one-element
/// lists and broadcast to the problem dimension where a vector is expected.
using ProblemParams = std::map<std::string, std::vector<double>>;

/// Builds a problem from its config name and parameters. Recognized keys:
///   all:           d, x0
///   HUBER_VALLEY:  G, sigma, huber_width
///   BOUNDED_WAVE:  G, sigma
///   HETERO_MIX:    H, s
/// Unknown keys and unknown names throw std::invalid_argument.
ProblemSpec make_problem(std::string_view name, const ProblemParams& params);

double eval_f(const ProblemSpec& problem, const ParamVector& x);
ParamVector exact_grad(const ProblemSpec& problem, const ParamVector& x);

struct OracleSample {
  ParamVector g;
  std::uint64_t tag = 0;  // stream counter at the first draw
};

/// Exact gradient plus coordinate noise sigma_i * (+-1), signs i.i.d. fair.
/// Always consumes `dim` draws from the stream.
OracleSample sto_grad(const ProblemSpec& problem, const ParamVector& x,
                      RandomStream& stream);

}  // namespace o2nc
