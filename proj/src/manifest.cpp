#include "excessd/manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "excessd/version.hpp"

namespace excessd {

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string fingerprint_bytes(std::string_view bytes) {
    return "fnv1a64:" + fnv1a64_hex(bytes);
}

std::string fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open file for fingerprinting: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fingerprint_bytes(ss.str());
}

std::string current_timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const std::string& command, const std::string& dataset_fingerprint,
                          std::optional<ModelSpec> model, std::optional<SamplerConfig> sampler,
                          const std::set<int>& fit_years, const std::string& timestamp) {
    RunManifest m;
    m.command = command;
    m.dataset_fingerprint = dataset_fingerprint;
    m.model = model;
    m.sampler = sampler;
    m.fit_years = fit_years;
    m.version = kVersion;
    m.timestamp = timestamp.empty() ? current_timestamp_utc() : timestamp;
    return m;
}

} // namespace excessd
