#pragma once

#include "soe/channel.hpp"
#include "soe/characterization.hpp"
#include "soe/measurement.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace soe {

/// Malformed input document (CSV schema, channel spec).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kScanCsvHeader = "alpha_deg,theta_deg,ideal_prob,counts";

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Rows sorted by (alpha, theta); angles in degrees with 6 decimals.
void write_scan_csv(std::ostream& os, const ScanResult& scan);
ScanResult read_scan_csv(std::istream& is);

/// Channel document {label, epsilon_xt, pol_rotation_deg, intermodal_phase_deg, seed}.
struct ChannelSpec {
  std::string label = "fiber";
  FiberChannelParams params;
};

ChannelSpec parse_channel_spec(const nlohmann::json& doc);
nlohmann::ordered_json channel_spec_to_json(const ChannelSpec& spec);
ChannelModel build_channel(const ChannelSpec& spec, const ModeSpace& space = ModeSpace{});

/// Array of {pol, ell, re, im} in storage order.
nlohmann::ordered_json state_to_json(const SpinOrbitState& psi);

nlohmann::ordered_json report_to_json(const ChannelReport& report);
std::string report_to_text(const ChannelReport& report);

struct RunManifest {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> outputs;
  std::string timestamp;  // ISO-8601 UTC
};

nlohmann::ordered_json manifest_to_json(const RunManifest& m);
std::string iso8601_now();

}  // namespace soe
