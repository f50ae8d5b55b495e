#pragma once

#include <json.hpp>

#include "excessd/manifest.hpp"
#include "excessd/modelcomp.hpp"
#include "excessd/placebo.hpp"
#include "excessd/predict.hpp"

namespace excessd {

using json = nlohmann::ordered_json;

/// Non-finite doubles serialize to null and read back as NaN.
json json_num(double v);
double num_or_nan(const json& j);

json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const json& j);

json to_json(const SamplerConfig& config);
SamplerConfig sampler_config_from_json(const json& j);

json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const json& j);

json to_json(const PosteriorDraws& draws);
PosteriorDraws draws_from_json(const json& j);

json to_json(const ExcessEstimate& est);
ExcessEstimate excess_from_json(const json& j);

json to_json(const PlaceboReport& report);
PlaceboReport placebo_from_json(const json& j);

json to_json(const FitSummary& summary);
FitSummary fit_summary_from_json(const json& j);

/// Published excess estimates for the same event, kept as a static
/// comparison block in consolidated reports.
json published_comparisons();

/// Stable serialization used for every emitted artifact.
std::string dump_json(const json& j);
json parse_json_file(const std::string& path);
void write_json_file(const json& j, const std::string& path);

} // namespace excessd
