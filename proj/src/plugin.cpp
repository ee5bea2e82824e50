#include "densfx/plugin.hpp"

#include <numeric>
#include <random>

namespace densfx {

std::pair<Index, Index> split_sizes(Index T, double alpha_frac) {
  if (T < 2) throw std::invalid_argument("data splitting needs T >= 2");
  if (!(alpha_frac > 0.0 && alpha_frac < 1.0)) throw std::invalid_argument("alpha_frac must lie in (0,1)");
  // Half-down rounding, so odd T with alpha_frac = 0.5 gives M = floor(T/2).
  Index M = Index(std::ceil(alpha_frac * double(T) - 0.5));
  M = std::clamp<Index>(M, 1, T - 1);
  return {T - M, M};
}

Split split(const SampleSet& samples, const SplitConfig& cfg) {
  const Index T = samples.cols();
  const auto [N, M] = split_sizes(T, cfg.alpha_frac);
  std::vector<Index> perm(static_cast<std::size_t>(T));
  std::iota(perm.begin(), perm.end(), Index(0));
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  Split out{SampleSet(samples.rows(), N), SampleSet(samples.rows(), M)};
  for (Index i = 0; i < N; ++i) out.eval.col(i) = samples.col(perm[std::size_t(i)]);
  for (Index i = 0; i < M; ++i) out.density.col(i) = samples.col(perm[std::size_t(N + i)]);
  return out;
}

std::string variant_id(Variant variant) { return variant == Variant::truncated ? "truncated" : "standard"; }

double optimal_k(Index M, int d) {
  if (M < 1) throw std::invalid_argument("optimal_k needs M >= 1");
  if (d < 1) throw std::invalid_argument("optimal_k needs d >= 1");
  return std::pow(double(M), 1.0 / double(1 + d));
}

}  // namespace densfx
