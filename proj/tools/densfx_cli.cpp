// densfx: command-line front end for weighted-ensemble density functional estimation.
//
//   densfx <command> --config cfg.json --out DIR [--seed N] [--threads N]
//
// Commands: weights, estimate, oracle, sweep-t, sweep-d, disttest, auc-delta.
// Every output embeds the effective configuration; equal configs give identical files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "densfx/baselines.hpp"
#include "densfx/harness.hpp"
#include "densfx/io.hpp"
#include "densfx/mixture.hpp"
#include "densfx/plugin.hpp"
#include "densfx/weights.hpp"
#include "densfx/precision.hpp"

namespace fs = std::filesystem;
using namespace densfx;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

json load_config(const CommonArgs& args) {
  json cfg = read_json_file(args.config);
  // The echo always records the seed actually used.
  cfg["seed"] = args.seed ? *args.seed : cfg.value("seed", std::uint64_t(1));
  fs::create_directories(args.out);
  return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) { return (fs::path(args.out) / name).string(); }

EnsembleConfig ensemble_config_from_json(const json& cfg) {
  EnsembleConfig ec;
  ec.d = cfg.at("d").get<int>();
  ec.T = cfg.at("T").get<std::int64_t>();
  ec.lbar = panel_options_from_json(cfg).lbar;
  return ec;
}

int cmd_weights(const CommonArgs& args) {
  const json cfg = load_config(args);
  const EnsembleConfig ec = ensemble_config_from_json(cfg);
  const double eta = cfg.value("eta", 3.0 * ec.d);
  const WeightSolution relaxed = solve_relaxed(ec, eta);
  json doc{{"schema", 1}, {"config", cfg}, {"key", weights_cache_key(ec, eta)}, {"relaxed", relaxed}};
  const WeightSolution exact = solve_exact_rounded(ec);
  doc["exact"] = exact;
  doc["eta_exact"] = double(eta_exact<quad>(ec));
  write_json_file(out_path(args, "weights.json"), doc);

  std::printf("relaxed: epsilon=%.10g norm_sq=%.10g (eta=%.10g)\n", relaxed.epsilon, relaxed.norm_sq, eta);
  std::printf("exact:   norm_sq=%.10g eta_exact=%.10g\n", exact.norm_sq, doc["eta_exact"].get<double>());
  for (Index i = 0; i < relaxed.residuals.size(); ++i)
    std::printf("  gamma_w(%lld): relaxed=%.6e exact=%.6e\n", static_cast<long long>(i), relaxed.residuals(i),
                exact.residuals(i));
  return 0;
}

int cmd_estimate(const CommonArgs& args) {
  const json cfg = load_config(args);
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  const json& src = cfg.at("samples");
  SampleSet samples;
  if (src.contains("csv")) {
    samples = read_samples_csv(src.at("csv").get<std::string>());
  } else {
    const json& syn = src.at("synthetic");
    samples = sample(syn.get<MixtureParams>(), syn.at("T").get<Index>(), seed);
  }
  const int d = int(samples.rows());
  const FunctionalSpec g = functional_for_dimension(cfg.at("functional"), d);
  const std::string estimator = cfg.value("estimator", std::string("ensemble"));
  const PanelOptions opts = panel_options_from_json(cfg);
  const SplitConfig split_cfg{opts.alpha_frac, seed};

  json doc{{"schema", 1}, {"config", cfg}};
  EstimateRecord rec;
  if (estimator == "truncated" || estimator == "standard") {
    const Split parts = split(samples, split_cfg);
    const double k = cfg.contains("k") ? cfg.at("k").get<double>() : optimal_k(parts.density.cols(), d);
    rec = plugin_estimate(g, parts.eval, parts.density, k,
                          estimator == "truncated" ? Variant::truncated : Variant::standard);
  } else if (estimator == "ensemble") {
    const EnsembleConfig ec{opts.lbar, d, std::int64_t(samples.cols())};
    const double eta = opts.eta > 0.0 ? opts.eta : 3.0 * d;
    const WeightSolution w = solve_relaxed(ec, eta);
    rec = ensemble_estimate(g, samples, ec, w, split_cfg);
    doc["weights_key"] = weights_cache_key(ec, eta);
    write_json_file(out_path(args, "weights.json"),
                    json{{"schema", 1}, {"key", weights_cache_key(ec, eta)}, {"relaxed", w}});
  } else if (estimator == "histogram") {
    const HistogramConfig hc = opts.histogram_bins > 0 ? HistogramConfig{opts.histogram_bins}
                                                       : HistogramConfig::default_for(samples.cols(), d);
    rec = histogram_plugin(g, samples, hc);
    doc["bins_per_dim"] = hc.bins_per_dim;
  } else if (estimator == "knn") {
    rec = knn_functional(g, samples, opts.knn_k);
  } else {
    throw std::invalid_argument("unknown estimator '" + estimator + "'");
  }
  rec.seed = seed;
  doc["record"] = rec;
  write_json_file(out_path(args, "summary.json"), doc);
  std::printf("%s estimate: %.17g (N=%lld, M=%lld)\n", rec.estimator_id.c_str(), rec.value,
              static_cast<long long>(rec.N), static_cast<long long>(rec.M));
  return 0;
}

std::vector<int> dimensions_of(const json& mixture) {
  if (mixture.contains("d") && mixture.at("d").is_array()) return mixture.at("d").get<std::vector<int>>();
  return {mixture.value("d", 6)};
}

int cmd_oracle(const CommonArgs& args) {
  const json cfg = load_config(args);
  const std::int64_t n_mc = cfg.value("n_mc", std::int64_t(1000000));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  const std::string cache_path = cfg.value("cache", out_path(args, "truth.json"));
  TruthCache cache = TruthCache::load(cache_path);

  json results = json::array();
  for (int d : dimensions_of(cfg.at("mixture"))) {
    json mj = cfg.at("mixture");
    mj["d"] = d;
    const MixtureParams params = mj.get<MixtureParams>();
    const FunctionalSpec g = functional_for_dimension(cfg.at("functional"), d);
    const TruthEstimate t = true_functional(params, g, n_mc, seed);
    cache.insert({params, g, n_mc, seed, t});
    results.push_back({{"params", params}, {"functional", g}, {"truth", t}});
    std::printf("%s %s: %.10g +- %.3g (n_mc=%lld)\n", params.id().c_str(), g.id().c_str(), t.value, t.std_error,
                static_cast<long long>(n_mc));
  }
  cache.save(cache_path);
  write_json_file(out_path(args, "summary.json"), json{{"schema", 1}, {"config", cfg}, {"results", results}});
  return 0;
}

TruthLookup truth_from_cache(const json& cfg) {
  const json t = cfg.value("truth", json::object());
  const std::string path = t.value("cache", std::string("truth.json"));
  const TruthCache cache = TruthCache::load(path);
  const json fspec = cfg.at("functional");
  const std::optional<std::int64_t> n_mc =
      t.contains("n_mc") ? std::optional<std::int64_t>(t.at("n_mc").get<std::int64_t>()) : std::nullopt;
  const std::uint64_t seed = t.value("seed", std::uint64_t(1));
  return [cache, fspec, n_mc, seed, path](const MixtureParams& params) {
    const FunctionalSpec g = functional_for_dimension(fspec, params.d);
    const auto hit = n_mc ? cache.find(params, g, *n_mc, seed) : cache.best(params, g);
    if (!hit)
      throw std::runtime_error("no truth value for " + params.id() + " / " + g.id() + " in '" + path +
                               "'; run `densfx oracle` with this mixture and functional first");
    return hit->estimate.value;
  };
}

int cmd_sweep(const CommonArgs& args, SweepAxis axis) {
  const json cfg = load_config(args);
  SweepSpec spec = sweep_spec_from_json(cfg, axis);
  spec.threads = args.threads;
  const auto rows = run_mse_sweep(spec, truth_from_cache(cfg));

  std::vector<std::vector<std::string>> cells;
  json summary_rows = json::array();
  for (const auto& r : rows) {
    cells.push_back({r.estimator_id, std::to_string(r.x), format_double(r.mse), format_double(r.bias_sq),
                     format_double(r.variance), format_double(r.mse_stderr), format_double(r.mean),
                     format_double(r.truth), std::to_string(r.trials)});
    summary_rows.push_back(r);
  }
  const std::string x_name = axis == SweepAxis::sample_size ? "T" : "d";
  write_csv(out_path(args, "results.csv"), cfg,
            {"estimator", x_name, "mse", "bias_sq", "variance", "mse_stderr", "mean", "truth", "trials"}, cells);
  write_json_file(out_path(args, "summary.json"), json{{"schema", 1}, {"config", cfg}, {"rows", summary_rows}});
  for (const auto& r : rows)
    std::printf("%-10s %s=%-6lld mse=%.4e (+- %.2e)\n", r.estimator_id.c_str(), x_name.c_str(),
                static_cast<long long>(r.x), r.mse, r.mse_stderr);
  return 0;
}

int cmd_disttest(const CommonArgs& args) {
  const json cfg = load_config(args);
  TestSpec spec = test_spec_from_json(cfg);
  spec.threads = args.threads;
  const DistTestResult res = run_distribution_test(spec);

  std::vector<std::string> header{"hypothesis", "experiment"};
  for (const auto& s : res.estimators) header.push_back(s.estimator_id);
  std::vector<std::vector<std::string>> cells;
  for (int h = 0; h < 2; ++h) {
    for (int e = 0; e < spec.experiments; ++e) {
      std::vector<std::string> row{h == 0 ? "H0" : "H1", std::to_string(e)};
      for (const auto& s : res.estimators)
        row.push_back(format_double(h == 0 ? s.null_estimates[std::size_t(e)] : s.alt_estimates[std::size_t(e)]));
      cells.push_back(std::move(row));
    }
  }
  write_csv(out_path(args, "results.csv"), cfg, header, cells);

  json per = json::array();
  for (const auto& s : res.estimators) {
    per.push_back({{"estimator_id", s.estimator_id},
                   {"auc", s.roc.auc},
                   {"auc_stderr", s.auc_stderr},
                   {"deflection", s.deflection},
                   {"roc", {{"fpr", s.roc.fpr}, {"tpr", s.roc.tpr}}}});
    std::printf("%-10s auc=%.4f (+- %.4f) deflection=%.3f\n", s.estimator_id.c_str(), s.roc.auc, s.auc_stderr,
                s.deflection);
  }
  write_json_file(out_path(args, "summary.json"), json{{"schema", 1}, {"config", cfg}, {"estimators", per}});
  return 0;
}

int cmd_auc_delta(const CommonArgs& args) {
  const json cfg = load_config(args);
  TestSpec spec = test_spec_from_json(cfg);
  spec.threads = args.threads;
  const std::vector<double> deltas = cfg.at("deltas").get<std::vector<double>>();
  const AucDeltaResult res = auc_vs_delta(spec, deltas);

  std::vector<std::vector<std::string>> cells;
  for (const auto& r : res.rows)
    cells.push_back({format_double(r.delta), r.estimator_id, format_double(r.auc), format_double(r.auc_stderr),
                     format_double(r.deflection)});
  write_csv(out_path(args, "results.csv"), cfg, {"delta", "estimator", "auc", "auc_stderr", "deflection"}, cells);
  json trend = json::object();
  for (const auto& [id, rho] : res.spearman) trend[id] = rho;
  // Full scale is 500 experiments of 5000 samples; anything smaller is labelled.
  const bool reduced = spec.experiments < 500 || spec.samples < 5000;
  const json scale{{"experiments", spec.experiments}, {"samples", spec.samples}, {"reduced", reduced}};
  write_json_file(out_path(args, "summary.json"),
                  json{{"schema", 1}, {"config", cfg}, {"scale", scale}, {"spearman", trend}});
  if (reduced)
    std::printf("reduced scale: %lld experiments x %lld samples (full: 500 x 5000)\n",
                static_cast<long long>(spec.experiments), static_cast<long long>(spec.samples));
  for (const auto& r : res.rows)
    std::printf("delta=%.3f %-10s auc=%.4f\n", r.delta, r.estimator_id.c_str(), r.auc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-ensemble estimation of density functionals"};
  app.require_subcommand(1);
  CommonArgs args;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "override the configured base seed");
    sub->add_option("--threads", args.threads, "worker threads (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    return sub;
  };
  CLI::App* weights = add("weights", "compute exact and relaxed ensemble weights");
  CLI::App* estimate = add("estimate", "run one estimator on a CSV or synthetic sample");
  CLI::App* oracle = add("oracle", "Monte-Carlo ground truth into a truth cache");
  CLI::App* sweep_t = add("sweep-t", "MSE versus sample size");
  CLI::App* sweep_d = add("sweep-d", "MSE versus dimension");
  CLI::App* disttest = add("disttest", "entropy-based distribution test with deflection and ROC");
  CLI::App* auc_delta = add("auc-delta", "AUC versus hypothesis offset delta");

  CLI11_PARSE(app, argc, argv);

  try {
    if (weights->parsed()) return cmd_weights(args);
    if (estimate->parsed()) return cmd_estimate(args);
    if (oracle->parsed()) return cmd_oracle(args);
    if (sweep_t->parsed()) return cmd_sweep(args, SweepAxis::sample_size);
    if (sweep_d->parsed()) return cmd_sweep(args, SweepAxis::dimension);
    if (disttest->parsed()) return cmd_disttest(args);
    if (auc_delta->parsed()) return cmd_auc_delta(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
