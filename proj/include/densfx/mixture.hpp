#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "densfx/functional.hpp"
#include "densfx/types.hpp"

namespace densfx {

/// Beta-uniform mixture f(a,b,p,d) = p * prod_j Beta(x_j; a, b) + (1 - p) on [0,1]^d.
struct MixtureParams {
  double a = 6.0;
  double b = 6.0;
  double p = 0.8;
  int d = 6;

  void validate() const;
  std::string id() const;
};

namespace detail {
template <typename Scalar>
Scalar log_power(Scalar exponent, Scalar v) {
  if (exponent == Scalar(0)) return Scalar(0);
  if (v == Scalar(0))
    return exponent > Scalar(0) ? -std::numeric_limits<Scalar>::infinity()
                                : std::numeric_limits<Scalar>::infinity();
  using std::log;
  return exponent * log(v);
}

template <typename Scalar>
Scalar beta_log_norm(Scalar a, Scalar b) {
  using std::lgamma;
  return lgamma(a + b) - lgamma(a) - lgamma(b);
}
}  // namespace detail

template <typename Scalar>
Scalar beta_pdf(Scalar x, Scalar a, Scalar b) {
  using std::exp;
  return exp(detail::beta_log_norm(a, b) + detail::log_power(a - Scalar(1), x) +
             detail::log_power(b - Scalar(1), Scalar(1) - x));
}

/// Mixture density at a single point; throws std::domain_error outside the unit cube.
template <typename Derived>
typename Derived::Scalar mixture_pdf(const Eigen::MatrixBase<Derived>& x, const MixtureParams& params) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  if (x.size() != params.d) throw std::invalid_argument("point dimension does not match mixture");
  const Scalar a = Scalar(params.a);
  const Scalar b = Scalar(params.b);
  Scalar log_beta = Scalar(params.d) * detail::beta_log_norm(a, b);
  for (Index j = 0; j < x.size(); ++j) {
    const Scalar v = x(j);
    if (!(v >= Scalar(0) && v <= Scalar(1)))
      throw std::domain_error("mixture_pdf: coordinate outside [0,1]");
    log_beta += detail::log_power(a - Scalar(1), v) + detail::log_power(b - Scalar(1), Scalar(1) - v);
  }
  if (params.p == 0.0) return Scalar(1);
  return Scalar(params.p) * exp(log_beta) + Scalar(1.0 - params.p);
}

/// Draws n points; deterministic in (params, seed).
SampleSet sample(const MixtureParams& params, Index n, std::uint64_t seed);

struct TruthEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_mc = 0;
};

/// Monte-Carlo expectation of g(f(X), X) under X ~ f with the exact density.
TruthEstimate true_functional(const MixtureParams& params, const FunctionalSpec& g, std::int64_t n_mc,
                              std::uint64_t seed);

struct TruthEntry {
  MixtureParams params;
  FunctionalSpec functional;
  std::int64_t n_mc = 0;
  std::uint64_t seed = 0;
  TruthEstimate estimate;
};

/// JSON-backed store of oracle values keyed by (params, functional, n_mc, seed).
class TruthCache {
 public:
  static TruthCache load(const std::string& path);  // missing file -> empty cache
  void save(const std::string& path) const;

  void insert(const TruthEntry& entry);
  std::optional<TruthEntry> find(const MixtureParams& params, const FunctionalSpec& g, std::int64_t n_mc,
                                 std::uint64_t seed) const;
  /// Entry with the largest n_mc for (params, functional), if any.
  std::optional<TruthEntry> best(const MixtureParams& params, const FunctionalSpec& g) const;

  const std::vector<TruthEntry>& entries() const { return entries_; }

  static std::string key(const MixtureParams& params, const FunctionalSpec& g, std::int64_t n_mc,
                         std::uint64_t seed);

 private:
  std::vector<TruthEntry> entries_;
};

}  // namespace densfx
