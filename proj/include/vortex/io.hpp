#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vortex/catalog.hpp"
#include "vortex/continuation.hpp"
#include "vortex/stability.hpp"

namespace vortex {

using json = nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// intervals carry hex endpoints so they survive a round trip bit for bit
json to_json(const Interval& x);
Interval interval_from_json(const json& j);

struct ConfigFile {
    RingSystem system;
    std::optional<double> omega;
    std::string provenance;
};

json config_to_json(const RingSystem& r, std::optional<double> omega = std::nullopt);
ConfigFile config_from_json(const json& j);
json fixture_to_json(const FixtureEntry& e);

json to_json(const BranchCertificate& c);
BranchCertificate certificate_from_json(const json& j);
json chain_to_json(const std::vector<BranchCertificate>& chain);
std::vector<BranchCertificate> chain_from_json(const json& j);

json to_json(const StabilityVerdict& v);

// JSON text with every float printed to 17 significant digits
std::string dump(const json& j, int indent = 2);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace vortex
