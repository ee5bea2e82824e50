#include "densfx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "densfx/baselines.hpp"
#include "densfx/plugin.hpp"

namespace densfx {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, std::size_t(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

WeightSolution panel_weights(const PanelOptions& opts, int d, Index T) {
  const EnsembleConfig cfg{opts.lbar, d, std::int64_t(T)};
  return solve_relaxed(cfg, opts.eta > 0.0 ? opts.eta : 3.0 * d);
}

PanelFactory estimator_panel(const FunctionalSpec& g, std::vector<std::string> ids, PanelOptions opts) {
  g.validate();
  for (const auto& id : ids)
    if (id != "standard" && id != "truncated" && id != "ensemble" && id != "histogram" && id != "knn")
      throw std::invalid_argument("unknown estimator '" + id + "'");

  return [g, ids, opts](int d, Index T) {
    const bool wants_ensemble = std::find(ids.begin(), ids.end(), "ensemble") != ids.end();
    WeightSolution weights;
    if (wants_ensemble) weights = panel_weights(opts, d, T);

    Panel panel;
    panel.ids = ids;
    panel.evaluate = [g, ids, opts, weights, d](const SampleSet& samples, std::uint64_t seed) {
      if (samples.rows() != d) throw std::invalid_argument("sample dimension does not match panel");
      const Index T = samples.cols();
      std::vector<double> out(ids.size(), std::numeric_limits<double>::quiet_NaN());

      const bool kernel = std::any_of(ids.begin(), ids.end(), [](const std::string& id) {
        return id == "standard" || id == "truncated" || id == "ensemble";
      });
      PluginBank bank;
      if (kernel) {
        const Split parts = split(samples, SplitConfig{opts.alpha_frac, mix_seed(seed)});
        const Index M = parts.density.cols();
        std::vector<double> ks{optimal_k(M, d)};
        if (weights.w.size() > 0) {
          const auto ens = ensemble_bandwidths(opts.lbar, M);
          ks.insert(ks.end(), ens.begin(), ens.end());
        }
        bank = plugin_bank(g, parts.eval, parts.density, std::span<const double>(ks));
      }
      for (std::size_t e = 0; e < ids.size(); ++e) {
        const std::string& id = ids[e];
        if (id == "standard") {
          out[e] = bank.standard[0];
        } else if (id == "truncated") {
          out[e] = bank.truncated[0];
        } else if (id == "ensemble") {
          out[e] = combine(weights.w, std::span<const double>(bank.truncated).subspan(1));
        } else if (id == "histogram") {
          const HistogramConfig hc =
              opts.histogram_bins > 0 ? HistogramConfig{opts.histogram_bins} : HistogramConfig::default_for(T, d);
          out[e] = histogram_plugin(g, samples, hc).value;
        } else if (id == "knn") {
          out[e] = knn_functional(g, samples, opts.knn_k).value;
        }
      }
      return out;
    };
    return panel;
  };
}

void SweepSpec::validate() const {
  functional.validate();
  params.validate();
  if (trials < 2) throw std::invalid_argument("a sweep needs at least 2 trials");
  if (values.empty()) throw std::invalid_argument("a sweep needs at least one x value");
  for (auto v : values) {
    if (axis == SweepAxis::sample_size && v < 2) throw std::invalid_argument("sweep sample sizes must be >= 2");
    if (axis == SweepAxis::dimension && v < 1) throw std::invalid_argument("sweep dimensions must be >= 1");
  }
}

std::vector<std::vector<double>> sweep_point_estimates(const SweepSpec& spec, const MixtureParams& params,
                                                       Index T) {
  const PanelFactory factory =
      spec.panel ? spec.panel : estimator_panel(spec.functional, spec.estimators, spec.options);
  const Panel panel = factory(params.d, T);
  std::vector<std::vector<double>> per_trial(std::size_t(spec.trials));
  parallel_for(per_trial.size(), spec.threads, [&](std::size_t r) {
    const std::uint64_t seed = spec.base_seed + r;
    per_trial[r] = panel.evaluate(sample(params, T, seed), seed);
  });
  std::vector<std::vector<double>> out(panel.ids.size(), std::vector<double>(per_trial.size()));
  for (std::size_t r = 0; r < per_trial.size(); ++r)
    for (std::size_t e = 0; e < panel.ids.size(); ++e) out[e][r] = per_trial[r][e];
  return out;
}

std::vector<SweepRow> run_mse_sweep(const SweepSpec& spec, const TruthLookup& truth) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (const std::int64_t x : spec.values) {
    MixtureParams params = spec.params;
    Index T = Index(x);
    if (spec.axis == SweepAxis::dimension) {
      params.d = int(x);
      T = Index(spec.fixed_T);
    }
    const double target = truth(params);
    const PanelFactory factory =
        spec.panel ? spec.panel : estimator_panel(spec.functional, spec.estimators, spec.options);
    const std::vector<std::string> ids = factory(params.d, T).ids;
    const auto estimates = sweep_point_estimates(spec, params, T);
    for (std::size_t e = 0; e < ids.size(); ++e) {
      const auto& v = estimates[e];
      const double R = double(v.size());
      SweepRow row;
      row.estimator_id = ids[e];
      row.x = x;
      row.truth = target;
      row.trials = int(v.size());
      row.mean = std::accumulate(v.begin(), v.end(), 0.0) / R;
      double se_sum = 0.0, var_sum = 0.0;
      for (double est : v) {
        se_sum += (est - target) * (est - target);
        var_sum += (est - row.mean) * (est - row.mean);
      }
      row.mse = se_sum / R;
      row.variance = var_sum / R;
      row.bias_sq = (row.mean - target) * (row.mean - target);
      double spread = 0.0;
      for (double est : v) {
        const double se = (est - target) * (est - target);
        spread += (se - row.mse) * (se - row.mse);
      }
      row.mse_stderr = std::sqrt(spread / (R - 1.0) / R);
      rows.push_back(row);
    }
  }
  return rows;
}

double deflection(std::span<const double> null_estimates, std::span<const double> alt_estimates) {
  if (null_estimates.size() < 2 || alt_estimates.size() < 2)
    throw std::invalid_argument("deflection needs at least two estimates per hypothesis");
  auto moments = [](std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / double(v.size() - 1)};
  };
  const auto [m0, v0] = moments(null_estimates);
  const auto [m1, v1] = moments(alt_estimates);
  if (!(v0 + v1 > 0.0)) throw std::domain_error("deflection undefined: both hypotheses have zero variance");
  return std::abs(m1 - m0) / std::sqrt(v0 + v1);
}

RocCurve roc_auc(std::span<const double> null_scores, std::span<const double> alt_scores, RocDirection direction) {
  if (null_scores.empty() || alt_scores.empty()) throw std::invalid_argument("ROC needs scores under both hypotheses");
  const double sign = direction == RocDirection::higher_is_alt ? 1.0 : -1.0;
  struct Scored {
    double score;
    bool alt;
  };
  std::vector<Scored> all;
  all.reserve(null_scores.size() + alt_scores.size());
  for (double s : null_scores) all.push_back({sign * s, false});
  for (double s : alt_scores) all.push_back({sign * s, true});
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double n0 = double(null_scores.size());
  const double n1 = double(alt_scores.size());
  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  double fp = 0.0, tp = 0.0, area = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    double dfp = 0.0, dtp = 0.0;
    while (j < all.size() && all[j].score == all[i].score) {
      (all[j].alt ? dtp : dfp) += 1.0;
      ++j;
    }
    // Trapezoid over a tie block counts tied pairs as one half.
    area += dfp * (tp + 0.5 * dtp);
    fp += dfp;
    tp += dtp;
    curve.fpr.push_back(fp / n0);
    curve.tpr.push_back(tp / n1);
    i = j;
  }
  curve.auc = area / (n0 * n1);
  return curve;
}

double auc_stderr(double auc, std::size_t n_null, std::size_t n_alt) {
  const double q1 = auc / (2.0 - auc);
  const double q2 = 2.0 * auc * auc / (1.0 + auc);
  const double n0 = double(n_null), n1 = double(n_alt);
  const double var = (auc * (1.0 - auc) + (n1 - 1.0) * (q1 - auc * auc) + (n0 - 1.0) * (q2 - auc * auc)) / (n0 * n1);
  return std::sqrt(std::max(0.0, var));
}

void TestSpec::validate() const {
  functional.validate();
  null_params().validate();
  alt_params().validate();
  if (experiments < 2) throw std::invalid_argument("distribution test needs at least 2 experiments per hypothesis");
  if (samples < 2) throw std::invalid_argument("distribution test needs at least 2 samples per experiment");
}

DistTestResult run_distribution_test(const TestSpec& spec) {
  spec.validate();
  const Panel panel = estimator_panel(spec.functional, spec.estimators, spec.options)(spec.d, spec.samples);
  const std::size_t E = std::size_t(spec.experiments);
  const MixtureParams h0 = spec.null_params();
  const MixtureParams h1 = spec.alt_params();

  std::vector<std::vector<double>> per_run(2 * E);
  parallel_for(per_run.size(), spec.threads, [&](std::size_t r) {
    const std::uint64_t seed = spec.base_seed + r;
    per_run[r] = panel.evaluate(sample(r < E ? h0 : h1, spec.samples, seed), seed);
  });

  DistTestResult out;
  for (std::size_t e = 0; e < panel.ids.size(); ++e) {
    EstimatorSummary s;
    s.estimator_id = panel.ids[e];
    for (std::size_t r = 0; r < E; ++r) s.null_estimates.push_back(per_run[r][e]);
    for (std::size_t r = E; r < 2 * E; ++r) s.alt_estimates.push_back(per_run[r][e]);
    try {
      s.deflection = deflection(s.null_estimates, s.alt_estimates);
    } catch (const std::domain_error&) {
      s.deflection = std::numeric_limits<double>::quiet_NaN();
    }
    s.roc = roc_auc(s.null_estimates, s.alt_estimates, spec.direction);
    s.auc_stderr = auc_stderr(s.roc.auc, E, E);
    out.estimators.push_back(std::move(s));
  }
  return out;
}

AucDeltaResult auc_vs_delta(const TestSpec& tmpl, std::span<const double> deltas) {
  AucDeltaResult out;
  std::map<std::string, std::vector<double>> aucs;
  for (double delta : deltas) {
    TestSpec spec = tmpl;
    spec.a1 = tmpl.a0 - delta;
    spec.b1 = tmpl.b0 - delta;
    const DistTestResult res = run_distribution_test(spec);
    for (const auto& s : res.estimators) {
      out.rows.push_back({delta, s.estimator_id, s.roc.auc, s.auc_stderr, s.deflection});
      aucs[s.estimator_id].push_back(s.roc.auc);
    }
  }
  for (const auto& [id, values] : aucs) out.spearman[id] = spearman(deltas, values);
  return out;
}

namespace {
std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t(0));
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double r = 0.5 * double(i + j - 1) + 1.0;
    for (std::size_t t = i; t < j; ++t) rank[idx[t]] = r;
    i = j;
  }
  return rank;
}
}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs two equal-length series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = double(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace densfx
