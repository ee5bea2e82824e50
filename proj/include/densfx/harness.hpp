#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "densfx/functional.hpp"
#include "densfx/mixture.hpp"
#include "densfx/types.hpp"
#include "densfx/weights.hpp"

namespace densfx {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Output must be index-addressed.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

struct PanelOptions {
  double alpha_frac = 0.5;
  std::vector<double> lbar = default_lbar();
  double eta = 0.0;        // <= 0 selects 3d
  int histogram_bins = 0;  // 0 selects ceil(T^{1/(d+2)})
  int knn_k = 5;
};

/// A fixed list of estimators evaluated together on one sample set.
///
/// The kernel estimators in a panel share one random split and one distance pass;
/// the split seed is derived from the trial seed.
struct Panel {
  std::vector<std::string> ids;
  std::function<std::vector<double>(const SampleSet&, std::uint64_t seed)> evaluate;
};

using PanelFactory = std::function<Panel(int d, Index T)>;

/// Known ids: "standard", "truncated" (both at k = M^{1/(1+d)}), "ensemble",
/// "histogram", "knn".
PanelFactory estimator_panel(const FunctionalSpec& g, std::vector<std::string> ids, PanelOptions opts = {});

/// Relaxed ensemble weights for a given dimension and sample size under `opts`.
WeightSolution panel_weights(const PanelOptions& opts, int d, Index T);

enum class SweepAxis { sample_size, dimension };

struct SweepSpec {
  FunctionalSpec functional = FunctionalSpec::shannon();
  MixtureParams params;
  std::vector<std::string> estimators{"standard", "truncated", "ensemble"};
  SweepAxis axis = SweepAxis::sample_size;
  std::vector<std::int64_t> values;  // T values, or d values
  std::int64_t fixed_T = 3000;       // sample size for a dimension sweep
  int trials = 100;
  std::uint64_t base_seed = 1;
  PanelOptions options;
  int threads = 1;
  PanelFactory panel;  // empty -> estimator_panel(functional, estimators, options)

  void validate() const;
};

struct SweepRow {
  std::string estimator_id;
  std::int64_t x = 0;  // T or d
  double truth = 0.0;
  double mean = 0.0;
  double mse = 0.0;
  double bias_sq = 0.0;
  double variance = 0.0;  // divisor R, so mse == bias_sq + variance
  double mse_stderr = 0.0;
  int trials = 0;
};

/// Truth value for a mixture; should throw when unavailable.
using TruthLookup = std::function<double(const MixtureParams&)>;

/// Trial r uses seed base_seed + r for sampling; rows are ordered by x, then panel order.
std::vector<SweepRow> run_mse_sweep(const SweepSpec& spec, const TruthLookup& truth);

/// Per-trial estimates of a sweep point: result[estimator][trial].
std::vector<std::vector<double>> sweep_point_estimates(const SweepSpec& spec, const MixtureParams& params,
                                                       Index T);

enum class RocDirection { higher_is_alt, lower_is_alt };

struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.5;
};

/// |mean1 - mean0| / sqrt(s0^2 + s1^2) with unbiased sample variances.
double deflection(std::span<const double> null_estimates, std::span<const double> alt_estimates);

/// Mann-Whitney AUC (ties count half) and the empirical ROC at every distinct threshold.
RocCurve roc_auc(std::span<const double> null_scores, std::span<const double> alt_scores,
                 RocDirection direction = RocDirection::higher_is_alt);

/// Hanley-McNeil standard error of an AUC.
double auc_stderr(double auc, std::size_t n_null, std::size_t n_alt);

struct TestSpec {
  FunctionalSpec functional = FunctionalSpec::shannon();
  double a0 = 6.0, b0 = 6.0;
  double a1 = 5.0, b1 = 5.0;
  double p = 0.75;
  int d = 6;
  int experiments = 500;
  Index samples = 1000;
  std::vector<std::string> estimators{"standard", "truncated", "ensemble"};
  std::uint64_t base_seed = 1;
  PanelOptions options;
  int threads = 1;
  // Lower entropy points to the more curved null density.
  RocDirection direction = RocDirection::higher_is_alt;

  void validate() const;
  MixtureParams null_params() const { return {a0, b0, p, d}; }
  MixtureParams alt_params() const { return {a1, b1, p, d}; }
};

struct EstimatorSummary {
  std::string estimator_id;
  std::vector<double> null_estimates;
  std::vector<double> alt_estimates;
  double deflection = 0.0;  // NaN when both groups have zero variance
  RocCurve roc;
  double auc_stderr = 0.0;
};

struct DistTestResult {
  std::vector<EstimatorSummary> estimators;
};

/// Null experiment e uses seed base_seed + e, alternative experiment e uses base_seed + E + e.
DistTestResult run_distribution_test(const TestSpec& spec);

struct AucDeltaRow {
  double delta = 0.0;
  std::string estimator_id;
  double auc = 0.5;
  double auc_stderr = 0.0;
  double deflection = 0.0;
};

struct AucDeltaResult {
  std::vector<AucDeltaRow> rows;
  std::map<std::string, double> spearman;  // rank correlation of AUC with delta, per estimator
};

/// Sweeps a1 = a0 - delta, b1 = b0 - delta with the template's other settings.
AucDeltaResult auc_vs_delta(const TestSpec& tmpl, std::span<const double> deltas);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace densfx
