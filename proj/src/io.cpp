#include "densfx/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace densfx {

namespace {
json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}
}  // namespace

void to_json(json& j, const WeightSolution& sol) {
  j = json{{"method", sol.method},         {"w", vector_json(sol.w)},
           {"epsilon", sol.epsilon},       {"norm_sq", sol.norm_sq},
           {"residuals", vector_json(sol.residuals)}, {"eta_bound", sol.eta_bound}};
}

void to_json(json& j, const EstimateRecord& rec) {
  j = json{{"value", rec.value}, {"estimator_id", rec.estimator_id}, {"N", rec.N}, {"M", rec.M}, {"seed", rec.seed}};
  j["k"] = std::isnan(rec.k) ? json(nullptr) : json(rec.k);
}

void to_json(json& j, const SweepRow& row) {
  j = json{{"estimator_id", row.estimator_id}, {"x", row.x},         {"truth", row.truth},
           {"mean", row.mean},                 {"mse", row.mse},     {"bias_sq", row.bias_sq},
           {"variance", row.variance},         {"mse_stderr", row.mse_stderr}, {"trials", row.trials}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const json& config, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "#schema=1\n#config=" << config.dump() << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

SampleSet read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> points;
  std::string text;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(text);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (points.empty() && width == 0) {  // header row
        width = std::size_t(std::count(text.begin(), text.end(), ',') + 1);
        continue;
      }
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                               " columns, found " + std::to_string(row.size()));
    points.push_back(std::move(row));
  }
  if (points.empty()) throw std::runtime_error(path + ": no sample rows");
  SampleSet out(Index(width), Index(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) out(Index(j), Index(i)) = points[i][j];
  return out;
}

PanelOptions panel_options_from_json(const json& cfg) {
  PanelOptions opts;
  opts.alpha_frac = cfg.value("alpha_frac", opts.alpha_frac);
  if (cfg.contains("lbar")) {
    const json& l = cfg.at("lbar");
    if (l.is_array()) {
      opts.lbar = l.get<std::vector<double>>();
    } else {
      opts.lbar = default_lbar(l.value("L", 50), l.value("a", 10.0), l.value("x", 3.0));
    }
  }
  opts.eta = cfg.value("eta", opts.eta);
  opts.histogram_bins = cfg.value("histogram_bins", opts.histogram_bins);
  opts.knn_k = cfg.value("knn_k", opts.knn_k);
  return opts;
}

FunctionalSpec functional_for_dimension(const json& spec, int d) {
  json copy = spec;
  if (copy.contains("q") && copy.at("q").is_string()) {
    if (copy.at("q").get<std::string>() != "d") throw std::invalid_argument("functional q must be an integer or \"d\"");
    copy["q"] = d;
  }
  return copy.get<FunctionalSpec>();
}

SweepSpec sweep_spec_from_json(const json& cfg, SweepAxis axis) {
  SweepSpec spec;
  spec.axis = axis;
  spec.params = cfg.at("mixture").get<MixtureParams>();
  spec.estimators = cfg.value("estimators", spec.estimators);
  spec.trials = cfg.value("trials", spec.trials);
  spec.base_seed = cfg.value("seed", spec.base_seed);
  spec.options = panel_options_from_json(cfg);
  if (axis == SweepAxis::sample_size) {
    spec.values = cfg.at("T").get<std::vector<std::int64_t>>();
    spec.functional = functional_for_dimension(cfg.at("functional"), spec.params.d);
  } else {
    spec.values = cfg.at("d").get<std::vector<std::int64_t>>();
    spec.fixed_T = cfg.value("T", spec.fixed_T);
    spec.functional = functional_for_dimension(cfg.at("functional"), int(spec.values.front()));
    const json fspec = cfg.at("functional");
    const PanelOptions opts = spec.options;
    const std::vector<std::string> ids = spec.estimators;
    // The integrand may depend on d (q = d), so the panel is built per dimension.
    spec.panel = [fspec, opts, ids](int d, Index T) {
      return estimator_panel(functional_for_dimension(fspec, d), ids, opts)(d, T);
    };
  }
  spec.validate();
  return spec;
}

TestSpec test_spec_from_json(const json& cfg) {
  TestSpec spec;
  if (cfg.contains("functional")) spec.functional = cfg.at("functional").get<FunctionalSpec>();
  if (cfg.contains("null")) {
    spec.a0 = cfg.at("null").value("a", spec.a0);
    spec.b0 = cfg.at("null").value("b", spec.b0);
  }
  if (cfg.contains("alt")) {
    spec.a1 = cfg.at("alt").value("a", spec.a1);
    spec.b1 = cfg.at("alt").value("b", spec.b1);
  }
  spec.a0 = cfg.value("a0", spec.a0);
  spec.b0 = cfg.value("b0", spec.b0);
  spec.p = cfg.value("p", spec.p);
  spec.d = cfg.value("d", spec.d);
  spec.experiments = cfg.value("experiments", spec.experiments);
  spec.samples = cfg.value("samples", spec.samples);
  spec.estimators = cfg.value("estimators", spec.estimators);
  spec.base_seed = cfg.value("seed", spec.base_seed);
  spec.options = panel_options_from_json(cfg);
  const std::string direction = cfg.value("direction", std::string("higher_is_alt"));
  if (direction == "higher_is_alt") {
    spec.direction = RocDirection::higher_is_alt;
  } else if (direction == "lower_is_alt") {
    spec.direction = RocDirection::lower_is_alt;
  } else {
    throw std::invalid_argument("direction must be higher_is_alt or lower_is_alt");
  }
  spec.validate();
  return spec;
}

}  // namespace densfx
