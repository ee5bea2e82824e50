#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>

#include "densfx/harness.hpp"
#include "densfx/plugin.hpp"

using namespace densfx;
using Catch::Approx;

namespace {
// Panel returning the truth for id "oracle" and a seed-dependent value for id "noisy".
PanelFactory fake_panel(double truth) {
  return [truth](int, Index) {
    Panel p;
    p.ids = {"oracle", "noisy"};
    p.evaluate = [truth](const SampleSet& s, std::uint64_t seed) {
      return std::vector<double>{truth, truth + 0.1 + 0.01 * double(seed % 7) + 1e-3 * s(0, 0)};
    };
    return p;
  };
}
}  // namespace

TEST_CASE("parallel_for visits every index once", "[harness]") {
  for (int threads : {1, 2, 5}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 6) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("MSE sweep with an exact estimator", "[harness]") {
  SweepSpec spec;
  spec.params = {6, 6, 0.8, 2};
  spec.values = {50, 100, 200};
  spec.trials = 6;
  spec.panel = fake_panel(0.75);
  const auto rows = run_mse_sweep(spec, [](const MixtureParams&) { return 0.75; });
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    if (r.estimator_id == "oracle") {
      CHECK(r.mse == 0.0);
      CHECK(r.bias_sq == 0.0);
      CHECK(r.variance == 0.0);
    } else {
      CHECK(r.mse > 0.0);
    }
    CHECK(r.mse == Approx(r.bias_sq + r.variance).margin(1e-12));
    CHECK(r.trials == 6);
    CHECK(r.truth == 0.75);
  }
  CHECK(rows[0].x == 50);
  CHECK(rows[1].estimator_id == "noisy");
  CHECK(rows[5].x == 200);
}

TEST_CASE("MSE sweep on real estimators", "[harness]") {
  SweepSpec spec;
  spec.functional = FunctionalSpec::shannon();
  spec.params = {6, 6, 0.8, 2};
  spec.estimators = {"standard", "truncated", "ensemble", "histogram", "knn"};
  spec.values = {200, 400};
  spec.trials = 4;
  const auto truth = [](const MixtureParams&) { return -0.3; };
  const auto rows = run_mse_sweep(spec, truth);
  REQUIRE(rows.size() == 10);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.mean));
    CHECK(r.mse == Approx(r.bias_sq + r.variance).margin(1e-12));
    CHECK(r.mse_stderr >= 0.0);
  }

  SweepSpec threaded = spec;
  threaded.threads = 3;
  const auto rows3 = run_mse_sweep(threaded, truth);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows3[i].mean == rows[i].mean);
    CHECK(rows3[i].mse == rows[i].mse);
  }
}

TEST_CASE("panel ensemble matches the library path", "[harness]") {
  const int d = 3;
  const Index T = 600;
  const auto g = FunctionalSpec::panter_dite(16, 3);
  const Panel panel = estimator_panel(g, {"truncated", "ensemble", "standard"})(d, T);
  const SampleSet s = sample({6, 6, 0.8, d}, T, 9);
  const auto out = panel.evaluate(s, 9);

  const SplitConfig sc{0.5, mix_seed(9)};
  const Split parts = split(s, sc);
  const double k = optimal_k(parts.density.cols(), d);
  CHECK(out[0] == plugin_estimate(g, parts.eval, parts.density, k, Variant::truncated).value);
  CHECK(out[2] == plugin_estimate(g, parts.eval, parts.density, k, Variant::standard).value);
  const EnsembleConfig ec{default_lbar(), d, T};
  CHECK(out[1] == Approx(ensemble_estimate(g, s, ec, solve_relaxed(ec), sc).value).epsilon(1e-13));
}

TEST_CASE("sweep validation and missing truth", "[harness]") {
  SweepSpec spec;
  spec.values = {100};
  spec.trials = 1;
  CHECK_THROWS_AS(run_mse_sweep(spec, [](const MixtureParams&) { return 0.0; }), std::invalid_argument);
  spec.trials = 2;
  spec.values = {};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.values = {100};
  CHECK_THROWS_AS(
      run_mse_sweep(spec, [](const MixtureParams&) -> double { throw std::runtime_error("run oracle first"); }),
      std::runtime_error);
  CHECK_THROWS_AS(estimator_panel(FunctionalSpec::shannon(), {"bogus"}), std::invalid_argument);
}

TEST_CASE("dimension sweep", "[harness]") {
  SweepSpec spec;
  spec.axis = SweepAxis::dimension;
  spec.params = {6, 6, 0.8, 1};
  spec.values = {1, 2};
  spec.fixed_T = 300;
  spec.trials = 3;
  spec.estimators = {"truncated", "ensemble"};
  std::vector<int> seen;
  const auto rows = run_mse_sweep(spec, [&](const MixtureParams& p) {
    seen.push_back(p.d);
    return 0.0;
  });
  CHECK(seen == std::vector<int>{1, 2});
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].x == 2);
}

TEST_CASE("deflection", "[harness]") {
  const std::vector<double> z{0, 0, 0, 0}, o{1, 1, 1, 1};
  CHECK_THROWS_AS(deflection(z, o), std::domain_error);
  const std::vector<double> a{0, 2}, b{3, 5};
  CHECK(deflection(a, b) == Approx(1.5));
  CHECK(deflection(b, a) == Approx(1.5));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(deflection(one, b), std::invalid_argument);
}

TEST_CASE("ROC and AUC", "[harness]") {
  const std::vector<double> lo{0.1, 0.2, 0.3}, hi{0.7, 0.8};
  CHECK(roc_auc(lo, hi).auc == 1.0);
  CHECK(roc_auc(lo, hi, RocDirection::lower_is_alt).auc == 0.0);
  CHECK(roc_auc(hi, lo, RocDirection::lower_is_alt).auc == 1.0);

  const std::vector<double> same{1.0, 2.0, 2.0, 3.0};
  CHECK(roc_auc(same, same).auc == 0.5);

  const std::vector<double> n{1, 2}, a{1.5, 3};
  const auto roc = roc_auc(n, a);
  CHECK(roc.auc == 0.75);
  REQUIRE(roc.fpr.size() == roc.tpr.size());
  CHECK(roc.fpr.front() == 0.0);
  CHECK(roc.tpr.front() == 0.0);
  CHECK(roc.fpr.back() == 1.0);
  CHECK(roc.tpr.back() == 1.0);
  for (std::size_t i = 1; i < roc.fpr.size(); ++i) {
    CHECK(roc.fpr[i] >= roc.fpr[i - 1]);
    CHECK(roc.tpr[i] >= roc.tpr[i - 1]);
  }
  // Trapezoid area under the returned curve equals the rank statistic.
  double area = 0.0;
  for (std::size_t i = 1; i < roc.fpr.size(); ++i)
    area += (roc.fpr[i] - roc.fpr[i - 1]) * 0.5 * (roc.tpr[i] + roc.tpr[i - 1]);
  CHECK(area == Approx(0.75));

  const std::vector<double> empty;
  CHECK_THROWS(roc_auc(empty, a));
  CHECK(auc_stderr(0.5, 500, 500) == Approx(std::sqrt(1.0 / 12.0 * (1.0 / 500 + 1.0 / 500))).epsilon(0.02));
}

TEST_CASE("distribution test with identical hypotheses", "[harness]") {
  TestSpec spec;
  spec.a1 = spec.a0;
  spec.b1 = spec.b0;
  spec.d = 3;
  spec.experiments = 60;
  spec.samples = 300;
  const auto res = run_distribution_test(spec);
  REQUIRE(res.estimators.size() == 3);
  for (const auto& e : res.estimators) {
    CHECK(e.null_estimates.size() == 60);
    CHECK(std::abs(e.roc.auc - 0.5) <= 4.0 * e.auc_stderr);
  }
}

TEST_CASE("distribution test is deterministic and thread independent", "[harness]") {
  TestSpec spec;
  spec.d = 2;
  spec.experiments = 12;
  spec.samples = 200;
  const auto a = run_distribution_test(spec);
  spec.threads = 4;
  const auto b = run_distribution_test(spec);
  for (std::size_t e = 0; e < a.estimators.size(); ++e) {
    CHECK(a.estimators[e].null_estimates == b.estimators[e].null_estimates);
    CHECK(a.estimators[e].alt_estimates == b.estimators[e].alt_estimates);
    CHECK(a.estimators[e].roc.auc == b.estimators[e].roc.auc);
  }
  TestSpec bad = spec;
  bad.experiments = 1;
  CHECK_THROWS_AS(run_distribution_test(bad), std::invalid_argument);
}

TEST_CASE("AUC versus delta", "[harness]") {
  TestSpec spec;
  spec.d = 2;
  spec.experiments = 30;
  spec.samples = 300;
  spec.estimators = {"truncated"};
  const std::vector<double> deltas{0.0, 2.0, 4.0};
  const auto res = auc_vs_delta(spec, deltas);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[0].delta == 0.0);
  CHECK(std::abs(res.rows[0].auc - 0.5) <= 4.0 * res.rows[0].auc_stderr);
  CHECK(res.rows[2].auc > 0.9);
  CHECK(res.spearman.at("truncated") > 0.9);
}

TEST_CASE("spearman", "[harness]") {
  const std::vector<double> x{1, 2, 3, 4}, up{10, 20, 25, 100}, down{4, 3, 2, 1}, tie{1, 1, 2, 2};
  CHECK(spearman(x, up) == Approx(1.0));
  CHECK(spearman(x, down) == Approx(-1.0));
  CHECK(spearman(x, tie) == Approx(0.894427191).epsilon(1e-8));
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK(std::isnan(spearman(x, flat)));
  CHECK_THROWS(spearman(x, std::vector<double>{1, 2}));
}
