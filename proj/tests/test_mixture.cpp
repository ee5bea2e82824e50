#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>

#include "densfx/mixture.hpp"

using namespace densfx;
using Catch::Approx;

namespace {
// Panter-Dite (n=16, q=6) on f(6,6,0.8,6), n_mc = 1e7, seed 1. An independent NumPy
// run with 1e7 draws gave 0.2653724 +- 5.3e-5.
constexpr double kPanterDiteTruth = 0.2653564074225165;
constexpr double kPanterDiteStderr = 5.3256762091696023e-05;

Eigen::VectorXd point(std::initializer_list<double> v) {
  Eigen::VectorXd x(Index(v.size()));
  Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}
}  // namespace

TEST_CASE("mixture_pdf closed forms", "[mixture]") {
  CHECK(mixture_pdf(point({0.2, 0.9}), MixtureParams{3, 7, 0.0, 2}) == 1.0);
  CHECK(mixture_pdf(point({0.0, 1.0, 0.37}), MixtureParams{1, 1, 0.5, 3}) == Approx(1.0).epsilon(1e-14));
  CHECK(mixture_pdf(point({0.5}), MixtureParams{6, 6, 0.8, 1}) == Approx(2.365625).epsilon(1e-13));
}

TEST_CASE("mixture_pdf rejects points off the unit cube", "[mixture]") {
  const MixtureParams params{6, 6, 0.8, 2};
  CHECK_THROWS_AS(mixture_pdf(point({0.5, 1.0000001}), params), std::domain_error);
  CHECK_THROWS_AS(mixture_pdf(point({-1e-9, 0.5}), params), std::domain_error);
  CHECK_THROWS_AS(mixture_pdf(point({0.5}), params), std::invalid_argument);
}

TEST_CASE("MixtureParams validation", "[mixture]") {
  CHECK_THROWS(MixtureParams{0, 1, 0.5, 1}.validate());
  CHECK_THROWS(MixtureParams{1, -1, 0.5, 1}.validate());
  CHECK_THROWS(MixtureParams{1, 1, 1.5, 1}.validate());
  CHECK_THROWS(MixtureParams{1, 1, 0.5, 0}.validate());
  CHECK_NOTHROW(MixtureParams{6, 6, 1.0, 6}.validate());
}

TEST_CASE("mixture_pdf is bounded below by 1-p and integrates to one", "[mixture]") {
  const MixtureParams params{6, 6, 0.8, 3};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  Eigen::VectorXd x(3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(j) = u(rng);
    const double f = mixture_pdf(x, params);
    REQUIRE(f >= 0.2 - 1e-15);
    sum += f;
    sum_sq += f * f;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 4.0 * se);
}

TEST_CASE("sample moments", "[mixture]") {
  SECTION("uniform component") {
    const SampleSet s = sample({2, 3, 0.0, 2}, 1000, 17);
    REQUIRE(s.rows() == 2);
    REQUIRE(s.cols() == 1000);
    const double tol = 4.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(1000.0);
    for (Index j = 0; j < 2; ++j) CHECK(std::abs(s.row(j).mean() - 0.5) < tol);
  }
  SECTION("pure beta component") {
    const Index n = 2000;
    const SampleSet s = sample({6, 6, 1.0, 3}, n, 5);
    const double var = 36.0 / (144.0 * 13.0);
    for (Index j = 0; j < 3; ++j) {
      const double mean = s.row(j).mean();
      const double v = (s.row(j).array() - mean).square().sum() / double(n - 1);
      CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(var / double(n)));
      // Beta(6,6) has excess kurtosis -0.4, so mu4 = 2.6 var^2.
      const double mu4 = 2.6 * var * var;
      CHECK(std::abs(v - var) < 4.0 * std::sqrt((mu4 - var * var) / double(n)));
    }
  }
  SECTION("points stay in the cube") {
    const SampleSet s = sample({0.5, 0.5, 0.7, 4}, 5000, 9);
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 1.0);
  }
}

TEST_CASE("sample is a function of (params, seed)", "[mixture]") {
  const MixtureParams params{6, 6, 0.8, 6};
  CHECK(sample(params, 300, 42) == sample(params, 300, 42));
  CHECK(sample(params, 300, 42) != sample(params, 300, 43));
  CHECK_THROWS(sample(params, 0, 1));
}

TEST_CASE("true_functional on the uniform density", "[mixture]") {
  const MixtureParams uniform{6, 6, 0.0, 3};
  const auto shannon = true_functional(uniform, FunctionalSpec::shannon(), 100000, 1);
  CHECK(std::abs(shannon.value) <= 4.0 * shannon.std_error + 1e-15);

  const auto quad = true_functional(uniform, FunctionalSpec::quadratic(), 100000, 1);
  CHECK(quad.value == 1.0);
  CHECK(quad.std_error == 0.0);
  CHECK(quad.n_mc == 100000);

  // Renyi integral of f^alpha equals 1, so the Renyi entropy log(1)/(1-alpha) is 0.
  const auto renyi = true_functional(uniform, FunctionalSpec::renyi(0.5), 100000, 1);
  CHECK(renyi.value == Approx(1.0).epsilon(1e-14));

  const auto pd = true_functional(uniform, FunctionalSpec::panter_dite(16, 6), 100000, 1);
  CHECK(pd.value == Approx(std::pow(16.0, -1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("true_functional standard error shrinks like n^-1/2", "[mixture]") {
  const MixtureParams params{6, 6, 0.8, 2};
  const auto a = true_functional(params, FunctionalSpec::shannon(), 50000, 4);
  const auto b = true_functional(params, FunctionalSpec::shannon(), 200000, 4);
  CHECK(b.std_error / a.std_error == Approx(0.5).epsilon(0.1));
  CHECK(std::abs(a.value - b.value) < 4.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("true_functional is deterministic and validates n_mc", "[mixture]") {
  const MixtureParams params{5, 5, 0.75, 6};
  const auto a = true_functional(params, FunctionalSpec::shannon(), 20000, 8);
  const auto b = true_functional(params, FunctionalSpec::shannon(), 20000, 8);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK_THROWS_AS(true_functional(params, FunctionalSpec::shannon(), 999, 8), std::invalid_argument);
}

TEST_CASE("pinned Panter-Dite ground truth", "[mixture][truth]") {
  const MixtureParams params{6, 6, 0.8, 6};
  const FunctionalSpec g = FunctionalSpec::panter_dite(16, 6);

  const TruthCache shipped = TruthCache::load(std::string(DENSFX_SOURCE_DIR) + "/data/truth.json");
  const auto entry = shipped.find(params, g, 10000000, 1);
  REQUIRE(entry);
  CHECK(entry->estimate.value == kPanterDiteTruth);
  CHECK(entry->estimate.std_error == Approx(kPanterDiteStderr).epsilon(1e-12));

  const auto fresh = true_functional(params, g, 200000, 99);
  CHECK(std::abs(fresh.value - kPanterDiteTruth) < 4.0 * std::hypot(fresh.std_error, kPanterDiteStderr));
}

TEST_CASE("TruthCache round trip", "[mixture]") {
  const auto path = std::filesystem::temp_directory_path() / "densfx_truth_cache_test.json";
  std::filesystem::remove(path);
  TruthCache empty = TruthCache::load(path.string());
  CHECK(empty.entries().empty());

  const MixtureParams params{6, 6, 0.8, 2};
  const FunctionalSpec g = FunctionalSpec::shannon();
  TruthCache cache;
  cache.insert({params, g, 1000, 1, {0.25, 0.01, 1000}});
  cache.insert({params, g, 5000, 1, {0.24, 0.005, 5000}});
  cache.insert({params, g, 1000, 1, {0.26, 0.01, 1000}});  // replaces the first entry
  cache.save(path.string());

  const TruthCache loaded = TruthCache::load(path.string());
  CHECK(loaded.entries().size() == 2);
  CHECK(loaded.find(params, g, 1000, 1)->estimate.value == 0.26);
  CHECK(loaded.best(params, g)->n_mc == 5000);
  CHECK_FALSE(loaded.find(params, g, 1000, 2));
  CHECK_FALSE(loaded.best(params, FunctionalSpec::quadratic()));
  std::filesystem::remove(path);
}
