#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "densfx/baselines.hpp"
#include "densfx/mixture.hpp"

using namespace densfx;
using Catch::Approx;

TEST_CASE("histogram configuration", "[baselines]") {
  CHECK_THROWS(HistogramConfig{0}.validate());
  CHECK(HistogramConfig::default_for(10000, 1).bins_per_dim == 22);  // ceil(10000^{1/3})
  CHECK(HistogramConfig::default_for(3000, 6).bins_per_dim == 3);    // ceil(3000^{1/8})
  CHECK(HistogramConfig::default_for(1, 3).bins_per_dim == 1);
}

TEST_CASE("histogram with a single cell is the uniform plug-in", "[baselines]") {
  const SampleSet s = sample({6, 6, 0.8, 3}, 500, 1);
  for (const auto& g : {FunctionalSpec::shannon(), FunctionalSpec::renyi(0.5), FunctionalSpec::quadratic(),
                        FunctionalSpec::panter_dite(16, 3)}) {
    const auto rec = histogram_plugin(g, s, {1});
    CHECK(rec.value == Approx(g.uniform_value()).margin(1e-15));
    CHECK(rec.estimator_id == "histogram");
  }
}

TEST_CASE("histogram with all samples in one cell", "[baselines]") {
  SampleSet s(2, 50);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 0.74);
  for (Index i = 0; i < 50; ++i) s.col(i) << u(rng), u(rng);
  // Four bins per axis, cell [0.5, 0.75)^2 of volume 1/16.
  const auto rec = histogram_plugin(FunctionalSpec::shannon(), s, {4});
  CHECK(rec.value == Approx(std::log(1.0 / 16.0)).epsilon(1e-13));
}

TEST_CASE("histogram Shannon on uniform data", "[baselines]") {
  const SampleSet s = sample({1, 1, 0.0, 1}, 10000, 3);
  const auto rec = histogram_plugin(FunctionalSpec::shannon(), s, HistogramConfig::default_for(10000, 1));
  CHECK(std::abs(rec.value) < 0.05);
}

TEST_CASE("histogram places the upper face in the last bin", "[baselines]") {
  SampleSet s(1, 2);
  s << 1.0, 0.9;
  const auto rec = histogram_plugin(FunctionalSpec::quadratic(), s, {2});
  CHECK(rec.value == Approx(4.0));  // both in [0.5, 1], density 2/(2*0.5)
  SampleSet off(1, 1);
  off << 1.5;
  CHECK_THROWS_AS(histogram_plugin(FunctionalSpec::quadratic(), off, {2}), std::domain_error);
}

TEST_CASE("k-NN Shannon on uniform data", "[baselines]") {
  const SampleSet s = sample({1, 1, 0.0, 1}, 5000, 4);
  const auto rec = knn_functional(FunctionalSpec::shannon(), s, 5);
  CHECK(std::abs(rec.value) < 0.05);
  CHECK(rec.k == 5.0);
  CHECK(rec.estimator_id == "knn");
}

TEST_CASE("k-NN Renyi integral on uniform data", "[baselines]") {
  const SampleSet s = sample({1, 1, 0.0, 2}, 3000, 5);
  CHECK(knn_renyi_integral(s, 5, 0.75) == Approx(1.0).margin(0.05));
}

TEST_CASE("k-NN Panter-Dite is the scaled Renyi integral", "[baselines]") {
  const SampleSet s = sample({6, 6, 0.8, 3}, 800, 6);
  const auto g = FunctionalSpec::panter_dite(16, 3);
  CHECK(knn_functional(g, s, 5).value == g.panter_dite_scale() * knn_renyi_integral(s, 5, g.panter_dite_order()));
  CHECK(knn_functional(FunctionalSpec::renyi(0.6), s, 4).value == knn_renyi_integral(s, 4, 0.6));
}

TEST_CASE("k-NN is invariant to sample order", "[baselines]") {
  const SampleSet s = sample({6, 6, 0.8, 2}, 400, 7);
  SampleSet r = s.rowwise().reverse();
  CHECK(knn_functional(FunctionalSpec::shannon(), s, 3).value ==
        Approx(knn_functional(FunctionalSpec::shannon(), r, 3).value).epsilon(1e-13));
}

TEST_CASE("k-NN error paths", "[baselines]") {
  const SampleSet s = sample({6, 6, 0.8, 2}, 20, 8);
  CHECK_THROWS_AS(knn_functional(FunctionalSpec::quadratic(), s, 3), std::invalid_argument);
  CHECK_THROWS_AS(knn_functional(FunctionalSpec::shannon(), s, 0), std::invalid_argument);
  CHECK_THROWS_AS(knn_functional(FunctionalSpec::shannon(), s, 20), std::invalid_argument);
  SampleSet dup(1, 4);
  dup << 0.2, 0.2, 0.5, 0.8;
  CHECK_THROWS_AS(knn_functional(FunctionalSpec::shannon(), dup, 1), std::domain_error);
}
