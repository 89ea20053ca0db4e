#include "soe/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace soe {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.rfind("-0.", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_field(const std::string& text, const char* column, std::size_t row) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    std::ostringstream os;
    os << "row " << row << ": column '" << column << "' has invalid value '" << text << "'";
    throw InputError(os.str());
  }
  return value;
}

}  // namespace

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
  std::vector<ScanRow> rows = scan.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
    return a.alpha != b.alpha ? a.alpha < b.alpha : a.theta < b.theta;
  });
  os << kScanCsvHeader << '\n';
  for (const auto& r : rows) {
    os << fixed(rad_to_deg(r.alpha), 6) << ',' << fixed(rad_to_deg(r.theta), 6) << ','
       << fixed(r.ideal_prob, 12) << ',' << r.counts << '\n';
  }
}

ScanResult read_scan_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("scan CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScanCsvHeader) {
    const auto got = split(line, ',');
    const auto want = split(kScanCsvHeader, ',');
    std::ostringstream os;
    os << "header mismatch";
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (i >= got.size() || got[i] != want[i]) {
        os << ": column " << i + 1 << " should be '" << want[i] << "'"
           << (i < got.size() ? " but is '" + got[i] + "'" : std::string(" but is missing"));
        break;
      }
    }
    if (got.size() > want.size()) os << ": unexpected extra column '" << got[want.size()] << "'";
    throw InputError(os.str());
  }

  ScanResult scan;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) {
      std::ostringstream os;
      os << "row " << row << ": expected 4 columns, found " << f.size();
      throw InputError(os.str());
    }
    ScanRow r;
    r.alpha = deg_to_rad(parse_field<double>(f[0], "alpha_deg", row));
    r.theta = deg_to_rad(parse_field<double>(f[1], "theta_deg", row));
    r.ideal_prob = parse_field<double>(f[2], "ideal_prob", row);
    r.counts = parse_field<std::uint64_t>(f[3], "counts", row);
    if (!(r.ideal_prob >= 0.0 && r.ideal_prob <= 1.0)) {
      std::ostringstream os;
      os << "row " << row << ": column 'ideal_prob' outside [0, 1]";
      throw InputError(os.str());
    }
    scan.rows.push_back(r);
  }
  if (scan.rows.empty()) throw InputError("scan CSV has no data rows");
  std::stable_sort(scan.rows.begin(), scan.rows.end(), [](const ScanRow& a, const ScanRow& b) {
    return a.alpha != b.alpha ? a.alpha < b.alpha : a.theta < b.theta;
  });
  return scan;
}

ChannelSpec parse_channel_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("channel spec must be a JSON object");
  static const std::vector<std::string> known = {"label", "epsilon_xt", "pol_rotation_deg",
                                                 "intermodal_phase_deg", "seed"};
  for (const auto& [key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InputError("channel spec has unknown field '" + key + "'");

  const auto number = [&](const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc[key].is_number()) throw InputError(std::string("channel field '") + key + "' must be a number");
    return doc[key].get<double>();
  };

  ChannelSpec spec;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw InputError("channel field 'label' must be a string");
    spec.label = doc["label"].get<std::string>();
  }
  spec.params.epsilon_xt = number("epsilon_xt", 0.0);
  spec.params.pol_rotation = deg_to_rad(number("pol_rotation_deg", 0.0));
  spec.params.intermodal_phase = deg_to_rad(number("intermodal_phase_deg", 0.0));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      throw InputError("channel field 'seed' must be a non-negative integer");
    spec.params.seed = doc["seed"].get<std::uint64_t>();
  }
  try {
    spec.params.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return spec;
}

nlohmann::ordered_json channel_spec_to_json(const ChannelSpec& spec) {
  nlohmann::ordered_json j;
  j["label"] = spec.label;
  j["epsilon_xt"] = spec.params.epsilon_xt;
  j["pol_rotation_deg"] = rad_to_deg(spec.params.pol_rotation);
  j["intermodal_phase_deg"] = rad_to_deg(spec.params.intermodal_phase);
  j["seed"] = spec.params.seed;
  return j;
}

ChannelModel build_channel(const ChannelSpec& spec, const ModeSpace& space) {
  return fiber_channel(spec.params, space, spec.label);
}

nlohmann::ordered_json state_to_json(const SpinOrbitState& psi) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  const ModeSpace& s = psi.space();
  for (Pol p : {Pol::R, Pol::L})
    for (int ell = -s.lmax(); ell <= s.lmax(); ++ell) {
      const auto a = psi.amplitude(p, ell);
      nlohmann::ordered_json e;
      e["pol"] = to_string(p);
      e["ell"] = ell;
      e["re"] = a.real();
      e["im"] = a.imag();
      arr.push_back(std::move(e));
    }
  return arr;
}

nlohmann::ordered_json report_to_json(const ChannelReport& r) {
  nlohmann::ordered_json j;
  j["channel_label"] = r.channel_label;
  j["v_max"] = r.v_max;
  j["v_max_error"] = r.v_max_error;
  j["alpha_at_max_deg"] = rad_to_deg(r.alpha_at_max);
  j["v_min"] = r.v_min;
  j["v_min_error"] = r.v_min_error;
  j["alpha_at_min_deg"] = rad_to_deg(r.alpha_at_min);
  j["delta_rad"] = r.delta;
  j["epsilon_xt"] = r.epsilon_xt;
  j["crosstalk_threshold"] = r.crosstalk_threshold;
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const auto& p : r.curve) {
    nlohmann::ordered_json e;
    e["alpha_deg"] = rad_to_deg(p.alpha);
    e["visibility"] = p.visibility;
    e["sigma"] = p.sigma;
    e["phase_rad"] = p.fit.phase;
    e["amplitude"] = p.fit.amplitude;
    e["residual_rms"] = p.fit.residual_rms;
    curve.push_back(std::move(e));
  }
  j["visibility_curve"] = std::move(curve);
  nlohmann::ordered_json comp = nlohmann::ordered_json::array();
  for (const auto& c : r.complementarity) {
    nlohmann::ordered_json e;
    e["alpha_deg"] = rad_to_deg(c.alpha);
    e["visibility"] = c.record.visibility;
    e["distinguishability"] = c.record.distinguishability;
    e["satisfied"] = c.record.satisfied;
    comp.push_back(std::move(e));
  }
  j["complementarity"] = std::move(comp);
  j["verdict"] = r.verdict;
  return j;
}

std::string report_to_text(const ChannelReport& r) {
  std::ostringstream os;
  os << "channel: " << r.channel_label << '\n';
  os << "V_max = " << fixed(r.v_max, 4) << " +/- " << fixed(r.v_max_error, 4) << " at alpha = "
     << fixed(rad_to_deg(r.alpha_at_max), 2) << " deg\n";
  os << "V_min = " << fixed(r.v_min, 4) << " +/- " << fixed(r.v_min_error, 4) << " at alpha = "
     << fixed(rad_to_deg(r.alpha_at_min), 2) << " deg\n";
  os << "delta = " << fixed(r.delta, 4) << " rad\n";
  os << "epsilon_xt = " << fixed(r.epsilon_xt, 6) << '\n';
  os << "alpha_deg   V       D       V^2+D^2  ok\n";
  for (const auto& c : r.complementarity) {
    const double s = c.record.visibility * c.record.visibility +
                     c.record.distinguishability * c.record.distinguishability;
    char line[96];
    std::snprintf(line, sizeof line, "%9.3f  %6.4f  %6.4f  %7.4f  %s\n", rad_to_deg(c.alpha),
                  c.record.visibility, c.record.distinguishability, s,
                  c.record.satisfied ? "yes" : "NO");
    os << line;
  }
  os << "verdict: " << r.verdict << " (threshold " << fixed(r.crosstalk_threshold, 3) << ")\n";
  return os.str();
}

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["tool_version"] = m.tool_version;
  j["outputs"] = m.outputs;
  j["timestamp"] = m.timestamp;
  return j;
}

std::string iso8601_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace soe
