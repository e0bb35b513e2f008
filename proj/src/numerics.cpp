#include "o2nc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace o2nc {

ParamVector::ParamVector(std::vector<double> entries)
    : entries_(std::move(entries)) {
  require_finite(entries_);
}

ParamVector::ParamVector(std::initializer_list<double> entries)
    : entries_(entries) {
  require_finite(entries_);
}

ParamVector ParamVector::zeros(std::size_t dim) {
  return ParamVector(std::vector<double>(dim, 0.0));
}

ParamVector ParamVector::filled(std::size_t dim, double value) {
  return ParamVector(std::vector<double>(dim, value));
}

bool ParamVector::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return v == 0.0; });
}

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError("non-finite vector");
  }
}

void require_same_dim(const ParamVector& x, const ParamVector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(x.dim()) +
                         " vs " + std::to_string(y.dim()));
  }
}

double l1_norm(const ParamVector& x) {
  double s = 0.0;
  for (double v : x.values()) s += std::abs(v);
  return s;
}

double squared_norm(const ParamVector& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return s;
}

double l2_norm(const ParamVector& x) { return std::sqrt(squared_norm(x)); }

double linf_norm(const ParamVector& x) {
  double m = 0.0;
  for (double v : x.values()) m = std::max(m, std::abs(v));
  return m;
}

double dot(const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

ParamVector axpy(double a, const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i] + y[i];
  return ParamVector(std::move(out));
}

ParamVector scale(double a, const ParamVector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a * x[i];
  return ParamVector(std::move(out));
}

ParamVector add(const ParamVector& x, const ParamVector& y) {
  return axpy(1.0, x, y);
}

ParamVector sub(const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] - y[i];
  return ParamVector(std::move(out));
}

ParamVector clip(const ParamVector& x, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("clip radius must be positive and finite");
  }
  require_finite(x.values());
  // In one dimension the ball is an interval; clip onto its endpoint exactly.
  if (x.dim() == 1) return ParamVector({clip_scalar(x[0], radius)});
  const double norm = l2_norm(x);
  if (norm <= radius) return x;
  double factor = radius / norm;
  std::vector<double> out(x.dim());
  for (;;) {
    for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] * factor;
    ParamVector result(out);
    // Rounding can leave the norm an ulp above the radius; shave the factor
    // until the computed norm respects it.
    if (l2_norm(result) <= radius) return result;
    factor = std::nextafter(factor, 0.0);
  }
}

double clip_scalar(double a, double radius) {
  if (!std::isfinite(a)) throw NonFiniteError("non-finite vector");
  if (!(radius > 0.0)) {
    throw std::invalid_argument("clip radius must be positive and finite");
  }
  return std::copysign(std::min(std::abs(a), radius), a);
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_from_bits(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::peek_u64(std::uint64_t counter) const noexcept {
  return mix64(seed_ + (counter + 1) * kGolden);
}

double RandomStream::next_uniform() noexcept {
  return uniform_from_bits(next_u64());
}

RandomStream RandomStream::substream(std::uint64_t id) const noexcept {
  // Second SplitMix64 increment constant keeps child seeds off the parent's
  // own counter lattice.
  return RandomStream(mix64(seed_ ^ mix64(id + 0xD1B54A32D192ED03ULL)));
}

double exp1_from_uniform(double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("uniform draw outside [0, 1)");
  }
  return -std::log1p(-u);
}

double sample_exp1(RandomStream& stream) {
  return exp1_from_uniform(stream.next_uniform());
}

double sample_sign(RandomStream& stream) {
  return (stream.next_u64() >> 63) != 0 ? 1.0 : -1.0;
}

double sample_normal(RandomStream& stream) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - stream.next_uniform();
  const double u2 = stream.next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace o2nc
