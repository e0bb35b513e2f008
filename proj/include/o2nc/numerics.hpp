#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace o2nc {

/// Raised when a vector would carry NaN or Inf.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when two operands disagree on dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense real vector with a fixed dimension and finite entries.
///
/// Every constructor and every free function producing a ParamVector checks
/// finiteness, so a live ParamVector never holds NaN or Inf. There is no
/// mutable element access; build a std::vector and wrap it instead.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> entries);
  ParamVector(std::initializer_list<double> entries);

  static ParamVector zeros(std::size_t dim);
  static ParamVector filled(std::size_t dim, double value);

  std::size_t dim() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> values() const noexcept { return entries_; }
  const std::vector<double>& vec() const noexcept { return entries_; }

  bool is_zero() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> entries_;
};

double l1_norm(const ParamVector& x);
double l2_norm(const ParamVector& x);
double linf_norm(const ParamVector& x);
double squared_norm(const ParamVector& x);
double dot(const ParamVector& x, const ParamVector& y);

/// a*x + y
ParamVector axpy(double a, const ParamVector& x, const ParamVector& y);
ParamVector scale(double a, const ParamVector& x);
ParamVector add(const ParamVector& x, const ParamVector& y);
ParamVector sub(const ParamVector& x, const ParamVector& y);

/// x * min(D / ||x||_2, 1). Throws NonFiniteError on non-finite input and
/// std::invalid_argument unless D > 0.
ParamVector clip(const ParamVector& x, double radius);

/// sign(a) * min(|a|, D), the one-dimensional clip.
double clip_scalar(double a, double radius);

/// Throws NonFiniteError("non-finite vector") if any entry is NaN or Inf.
void require_finite(std::span<const double> values);
void require_same_dim(const ParamVector& x, const ParamVector& y);

/// Counter-based uniform source built on the SplitMix64 finalizer.
///
/// Draw k (zero-based) of a stream with seed s is
///   mix64(s + (k + 1) * 0x9E3779B97F4A7C15)
/// where mix64 is
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
/// Uniforms on [0, 1) take the top 53 bits: (u64 >> 11) * 2^-53.
/// A stream is a plain value; copies replay the same sequence.
class RandomStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  RandomStream() = default;
  explicit RandomStream(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Value of draw `counter` without touching the stream.
  std::uint64_t peek_u64(std::uint64_t counter) const noexcept;

  std::uint64_t next_u64() noexcept { return peek_u64(counter_++); }
  double next_uniform() noexcept;

  /// Independent child stream. Children with different ids do not overlap
  /// with each other or with the parent in any practical sense.
  RandomStream substream(std::uint64_t id) const noexcept;

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;
double uniform_from_bits(std::uint64_t bits) noexcept;

/// Inverse-CDF transform of a uniform on [0,1) into Exp(1): -ln(1 - u).
double exp1_from_uniform(double u);
double sample_exp1(RandomStream& stream);

/// +1 or -1 with equal probability.
double sample_sign(RandomStream& stream);

/// Standard normal via Box-Muller; consumes two uniforms.
double sample_normal(RandomStream& stream);

}  // namespace o2nc
