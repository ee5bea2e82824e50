#pragma once

#include "densfx/functional.hpp"
#include "densfx/plugin.hpp"
#include "densfx/types.hpp"

namespace densfx {

struct HistogramConfig {
  int bins_per_dim = 1;

  void validate() const;
  /// ceil(T^{1/(d+2)}) bins per axis.
  static HistogramConfig default_for(Index T, int d);
};

/// Histogram plug-in: cell density count / (T * cell volume), averaged over all T samples.
EstimateRecord histogram_plugin(const FunctionalSpec& g, const SampleSet& samples, const HistogramConfig& cfg);

/// k-NN estimate of integral f^alpha (Leonenko-Pronzato-Savani, sup-norm balls).
double knn_renyi_integral(const SampleSet& samples, int k, double alpha);

/// Kozachenko-Leonenko entropy for Shannon, power-distance estimator for Renyi and Panter-Dite.
/// Throws std::domain_error when a k-NN distance is zero.
EstimateRecord knn_functional(const FunctionalSpec& g, const SampleSet& samples, int k);

}  // namespace densfx
