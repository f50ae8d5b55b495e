#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "excessd/design.hpp"
#include "excessd/hmc.hpp"

namespace excessd {

/// Provenance stamped into every emitted artifact. Two runs with identical
/// manifests produce byte-identical numerical outputs; the timestamp is
/// pinnable (--timestamp / EXCESSD_TIMESTAMP) to make whole files
/// byte-reproducible.
struct RunManifest {
    std::string command;
    std::string dataset_fingerprint;
    std::optional<ModelSpec> model;
    std::optional<SamplerConfig> sampler;
    std::set<int> fit_years;
    std::string version;
    std::string timestamp;
};

std::string fnv1a64_hex(std::string_view bytes);
std::string fingerprint_bytes(std::string_view bytes); // "fnv1a64:<hex>"
std::string fingerprint_file(const std::string& path);

std::string current_timestamp_utc();

RunManifest make_manifest(const std::string& command, const std::string& dataset_fingerprint,
                          std::optional<ModelSpec> model, std::optional<SamplerConfig> sampler,
                          const std::set<int>& fit_years, const std::string& timestamp);

} // namespace excessd
