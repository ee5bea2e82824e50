#pragma once

#include <string>
#include <vector>

#include "densfx/harness.hpp"
#include "densfx/plugin.hpp"
#include "densfx/serialize.hpp"
#include "densfx/weights.hpp"

namespace densfx {

// Output documents -----------------------------------------------------------

void to_json(json& j, const WeightSolution& sol);  // {w, epsilon, norm_sq, residuals, eta_bound, method}
void to_json(json& j, const EstimateRecord& rec);
void to_json(json& j, const SweepRow& row);

/// Lossless decimal rendering used in every CSV cell.
std::string format_double(double v);

/// CSV with a "#schema=1" line, a "#config=<compact json>" line, a header row, then rows.
void write_csv(const std::string& path, const json& config, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Sample points from CSV: one point per row, d numeric columns, optional header row.
/// Errors carry the 1-based line number.
SampleSet read_samples_csv(const std::string& path);

// Configuration documents ----------------------------------------------------

/// {"alpha_frac", "lbar": [...] | {"L", "a", "x"}, "eta", "histogram_bins", "knn_k"}
PanelOptions panel_options_from_json(const json& cfg);

/// Functional for a given dimension; "q": "d" ties the Panter-Dite quantizer dimension to d.
FunctionalSpec functional_for_dimension(const json& spec, int d);

SweepSpec sweep_spec_from_json(const json& cfg, SweepAxis axis);
TestSpec test_spec_from_json(const json& cfg);

}  // namespace densfx
