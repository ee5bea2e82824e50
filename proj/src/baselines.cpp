#include "densfx/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "densfx/kernel_density.hpp"

namespace densfx {

void HistogramConfig::validate() const {
  if (bins_per_dim < 1) throw std::invalid_argument("histogram needs at least one bin per axis");
}

HistogramConfig HistogramConfig::default_for(Index T, int d) {
  return {std::max(1, int(std::ceil(std::pow(double(T), 1.0 / double(d + 2)))))};
}

EstimateRecord histogram_plugin(const FunctionalSpec& g, const SampleSet& samples, const HistogramConfig& cfg) {
  cfg.validate();
  g.validate();
  const Index T = samples.cols();
  const Index d = samples.rows();
  if (T < 1) throw std::invalid_argument("histogram needs at least one sample");
  const int bins = cfg.bins_per_dim;

  std::vector<std::vector<int>> cells(static_cast<std::size_t>(T), std::vector<int>(std::size_t(d)));
  std::map<std::vector<int>, Index> counts;
  for (Index i = 0; i < T; ++i) {
    auto& cell = cells[std::size_t(i)];
    for (Index j = 0; j < d; ++j) {
      const double v = samples(j, i);
      if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("histogram: sample outside the unit cube");
      cell[std::size_t(j)] = std::min(bins - 1, int(v * bins));
    }
    ++counts[cell];
  }
  const double cell_volume = std::pow(1.0 / double(bins), double(d));
  double sum = 0.0;
  for (Index i = 0; i < T; ++i) {
    const double f = double(counts[cells[std::size_t(i)]]) / (double(T) * cell_volume);
    sum += g(f, samples.col(i));
  }
  EstimateRecord rec;
  rec.value = sum / double(T);
  rec.estimator_id = "histogram";
  rec.N = T;
  rec.M = T;
  return rec;
}

namespace {

// Distance from every sample to its k-th nearest other sample.
std::vector<double> knn_distances(const SampleSet& samples, int k) {
  const Index T = samples.cols();
  if (k < 1 || Index(k) >= T) throw std::invalid_argument("k-NN needs 1 <= k < T");
  std::vector<double> out(static_cast<std::size_t>(T));
  std::vector<double> dist(static_cast<std::size_t>(T - 1));
  for (Index i = 0; i < T; ++i) {
    std::size_t n = 0;
    for (Index j = 0; j < T; ++j)
      if (j != i) dist[n++] = linf_distance(samples.col(i), samples.col(j));
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    const double rho = dist[std::size_t(k - 1)];
    if (!(rho > 0.0)) throw std::domain_error("k-NN distance is zero (duplicate samples)");
    out[std::size_t(i)] = rho;
  }
  return out;
}

}  // namespace

double knn_renyi_integral(const SampleSet& samples, int k, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) throw std::invalid_argument("Renyi order must be positive and not 1");
  if (!(double(k) + 1.0 - alpha > 0.0)) throw std::invalid_argument("k-NN Renyi estimate needs k > alpha - 1");
  const std::vector<double> rho = knn_distances(samples, k);
  const double T = double(samples.cols());
  const double d = double(samples.rows());
  const double log_ck = (std::lgamma(double(k)) - std::lgamma(double(k) + 1.0 - alpha)) / (1.0 - alpha);
  double sum = 0.0;
  for (double r : rho) {
    const double log_mass = std::log(T - 1.0) + log_ck + d * std::log(2.0 * r);
    sum += std::exp((1.0 - alpha) * log_mass);
  }
  return sum / T;
}

EstimateRecord knn_functional(const FunctionalSpec& g, const SampleSet& samples, int k) {
  g.validate();
  EstimateRecord rec;
  rec.estimator_id = "knn";
  rec.k = double(k);
  rec.N = samples.cols();
  rec.M = samples.cols();
  switch (g.kind) {
    case FunctionalKind::shannon: {
      const std::vector<double> rho = knn_distances(samples, k);
      const double T = double(samples.cols());
      const double d = double(samples.rows());
      double sum = 0.0;
      for (double r : rho) sum += std::log(2.0 * r);
      rec.value = boost::math::digamma(T) - boost::math::digamma(double(k)) + d * sum / T;
      break;
    }
    case FunctionalKind::renyi:
      rec.value = knn_renyi_integral(samples, k, g.alpha);
      break;
    case FunctionalKind::panter_dite:
      rec.value = g.panter_dite_scale() * knn_renyi_integral(samples, k, g.panter_dite_order());
      break;
    case FunctionalKind::quadratic:
      throw std::invalid_argument("k-NN baseline supports shannon, renyi and panter_dite only");
  }
  return rec;
}

}  // namespace densfx
