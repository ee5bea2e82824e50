#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "densfx/kernel_density.hpp"
#include "densfx/types.hpp"

namespace densfx {

struct SplitConfig {
  double alpha_frac = 0.5;  // share of points used for density estimation (M / T)
  std::uint64_t seed = 0;
};

/// Evaluation part (N points) and density part (M points) of a random split.
struct Split {
  SampleSet eval;
  SampleSet density;
};

/// (N, M) for a total of T points. M = alpha_frac * T rounded half-down, clamped to [1, T-1].
std::pair<Index, Index> split_sizes(Index T, double alpha_frac);

/// Disjoint exhaustive partition of the columns, permuted by `cfg.seed`.
Split split(const SampleSet& samples, const SplitConfig& cfg);

struct EstimateRecord {
  double value = 0.0;
  std::string estimator_id;
  double k = std::numeric_limits<double>::quiet_NaN();  // NaN when no single bandwidth applies
  Index N = 0;
  Index M = 0;
  std::uint64_t seed = 0;
};

/// Plug-in values of a functional for a bank of bandwidths, both kernel variants.
struct PluginBank {
  std::vector<double> ks;
  std::vector<double> truncated;
  std::vector<double> standard;
};

/// Uniform-kernel plug-in estimates (1/N) sum_i g(f_k(X_i), X_i) for every k in `ks`,
/// with the density built from `density` only. One distance pass per evaluation point
/// serves every bandwidth.
template <typename G>
PluginBank plugin_bank(const G& g, const SampleSet& eval, const SampleSet& density, std::span<const double> ks) {
  const Index N = eval.cols();
  const Index M = density.cols();
  const int d = int(eval.rows());
  if (density.rows() != eval.rows()) throw std::invalid_argument("evaluation and density parts differ in dimension");
  if (N < 1 || M < 1) throw std::invalid_argument("plug-in estimate needs N >= 1 and M >= 1");

  // Sort windows by width; results are reported in the caller's order.
  std::vector<std::size_t> order(ks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });

  std::vector<KernelWindow<double>> windows;
  std::vector<double> halves;
  windows.reserve(ks.size());
  for (std::size_t idx : order) {
    windows.emplace_back(ks[idx], M, d);
    halves.push_back(windows.back().half_width());
  }

  for (Index i = 0; i < N; ++i)
    for (int j = 0; j < d; ++j)
      if (!(eval(j, i) >= 0.0 && eval(j, i) <= 1.0))
        throw std::domain_error("plug-in estimate: evaluation point outside the unit cube");

  const std::size_t L = ks.size();
  std::vector<double> sum_trunc(L, 0.0);
  std::vector<double> sum_std(L, 0.0);
  std::vector<Index> counts(L);
  for (Index i = 0; i < N; ++i) {
    const auto x = eval.col(i);
    window_counts(x, density, std::span<const double>(halves), std::span<Index>(counts));
    for (std::size_t w = 0; w < L; ++w) {
      const auto& win = windows[w];
      const double c = double(counts[w]);
      const double f_std = c / (double(M) * win.nominal_volume());
      const double f_trunc = c / (double(M) * truncated_volume(x, win));
      sum_std[w] += g(f_std, x);
      sum_trunc[w] += g(f_trunc, x);
    }
  }

  PluginBank out;
  out.ks.assign(ks.begin(), ks.end());
  out.truncated.resize(L);
  out.standard.resize(L);
  for (std::size_t w = 0; w < L; ++w) {
    out.truncated[order[w]] = sum_trunc[w] / double(N);
    out.standard[order[w]] = sum_std[w] / double(N);
  }
  return out;
}

std::string variant_id(Variant variant);

template <typename G>
EstimateRecord plugin_estimate(const G& g, const SampleSet& eval, const SampleSet& density, double k,
                               Variant variant) {
  if (k > double(density.cols())) throw std::invalid_argument("plug-in estimate needs k <= M");
  const double ks[1] = {k};
  const PluginBank bank = plugin_bank(g, eval, density, std::span<const double>(ks));
  EstimateRecord rec;
  rec.value = variant == Variant::truncated ? bank.truncated[0] : bank.standard[0];
  rec.estimator_id = variant_id(variant);
  rec.k = k;
  rec.N = eval.cols();
  rec.M = density.cols();
  return rec;
}

/// Bandwidth M^{1/(1+d)} with unit leading constant.
double optimal_k(Index M, int d);

}  // namespace densfx
