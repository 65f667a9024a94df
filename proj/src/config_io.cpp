#include "bchain/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bchain {

using nlohmann::json;

bool RunSettings::has(const std::string& key) const {
  return std::find(present.begin(), present.end(), key) != present.end();
}

void RunSettings::require(std::initializer_list<const char*> keys) const {
  for (const char* key : keys) {
    if (!has(key)) {
      throw ConfigError(key, "required key is missing");
    }
  }
}

namespace {

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) {
    throw ConfigError(key, "expected a number");
  }
  return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> as_doubles(const json& v, const std::string& key) {
  if (!v.is_array()) {
    throw ConfigError(key, "expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    out.push_back(as_double(x, key));
  }
  return out;
}

using Setter = std::function<void(RunSettings&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_particles", [](RunSettings& s, const json& v, const std::string& k) { s.system.n_particles = as_u64(v, k); }},
      {"epsilon", [](RunSettings& s, const json& v, const std::string& k) { s.system.epsilon = as_double(v, k); }},
      {"lambda", [](RunSettings& s, const json& v, const std::string& k) { s.system.lambda = as_double(v, k); }},
      {"energy_levels",
       [](RunSettings& s, const json& v, const std::string& k) { s.system.energy_levels = as_doubles(v, k); }},
      {"energies", [](RunSettings& s, const json& v, const std::string& k) { s.system.energies = as_doubles(v, k); }},
      {"seed", [](RunSettings& s, const json& v, const std::string& k) { s.system.seed = as_u64(v, k); }},
      {"replicas", [](RunSettings& s, const json& v, const std::string& k) { s.system.replicas = as_u64(v, k); }},
      {"horizon_macro", [](RunSettings& s, const json& v, const std::string& k) { s.horizon_macro = as_double(v, k); }},
      {"t_list", [](RunSettings& s, const json& v, const std::string& k) { s.t_list = as_doubles(v, k); }},
      {"epsilon_ladder",
       [](RunSettings& s, const json& v, const std::string& k) { s.epsilon_ladder = as_doubles(v, k); }},
      {"reference",
       [](RunSettings& s, const json& v, const std::string& k) {
         if (!v.is_string() || (v != "uniformization" && v != "gillespie")) {
           throw ConfigError(k, "expected \"uniformization\" or \"gillespie\"");
         }
         s.reference = v.get<std::string>();
       }},
      {"state_cap", [](RunSettings& s, const json& v, const std::string& k) { s.state_cap = as_u64(v, k); }},
      {"lambda_list", [](RunSettings& s, const json& v, const std::string& k) { s.lambda_list = as_doubles(v, k); }},
      {"window_micro", [](RunSettings& s, const json& v, const std::string& k) { s.window_micro = as_double(v, k); }},
      {"limit_paths", [](RunSettings& s, const json& v, const std::string& k) { s.limit_paths = as_u64(v, k); }},
      {"kernel_q", [](RunSettings& s, const json& v, const std::string& k) { s.kernel_q = as_double(v, k); }},
      {"kernel_p_sign",
       [](RunSettings& s, const json& v, const std::string& k) {
         if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1)) {
           throw ConfigError(k, "expected 1 or -1");
         }
         s.kernel_p_sign = v.get<int>();
       }},
      {"kernel_speed", [](RunSettings& s, const json& v, const std::string& k) { s.kernel_speed = as_double(v, k); }},
      {"kernel_t", [](RunSettings& s, const json& v, const std::string& k) { s.kernel_t = as_double(v, k); }},
      {"kernel_grid", [](RunSettings& s, const json& v, const std::string& k) { s.kernel_grid = as_u64(v, k); }},
      {"doeblin_speeds",
       [](RunSettings& s, const json& v, const std::string& k) { s.doeblin_speeds = as_doubles(v, k); }},
      {"t0", [](RunSettings& s, const json& v, const std::string& k) { s.t0 = as_double(v, k); }},
      {"doeblin_grid", [](RunSettings& s, const json& v, const std::string& k) { s.doeblin_grid = as_u64(v, k); }},
      {"mixing_times", [](RunSettings& s, const json& v, const std::string& k) { s.mixing_times = as_doubles(v, k); }},
  };
  return table;
}

}  // namespace

RunSettings settings_from_json(const json& doc) {
  const json* body = &doc;
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (!doc.contains("config")) {
      throw ConfigError("config", "manifest has no config object");
    }
    body = &doc.at("config");
  }
  if (!body->is_object()) {
    throw ConfigError("<root>", "config must be a JSON object");
  }
  RunSettings settings;
  for (const auto& [key, value] : body->items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(key, "unknown key");
    }
    it->second(settings, value, key);
    settings.present.push_back(key);
  }
  return settings;
}

RunSettings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("--config", "cannot open " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("not valid JSON: ") + e.what());
  }
  return settings_from_json(doc);
}

json settings_to_json(const RunSettings& s) {
  json out = json::object();
  const auto& sys = s.system;
  auto put = [&](const char* key, auto value) {
    if (s.has(key)) {
      out[key] = value;
    }
  };
  put("n_particles", sys.n_particles);
  put("epsilon", sys.epsilon);
  put("energy_levels", sys.energy_levels);
  put("energies", sys.energies);
  // Keys with defaults are always written.
  out["lambda"] = sys.lambda;
  out["seed"] = sys.seed;
  out["replicas"] = sys.replicas;
  out["horizon_macro"] = s.horizon_macro;
  out["t_list"] = s.t_list;
  put("epsilon_ladder", s.epsilon_ladder);
  out["reference"] = s.reference;
  out["state_cap"] = s.state_cap;
  put("lambda_list", s.lambda_list);
  out["window_micro"] = s.window_micro;
  out["limit_paths"] = s.limit_paths;
  out["kernel_q"] = s.kernel_q;
  out["kernel_p_sign"] = s.kernel_p_sign;
  out["kernel_speed"] = s.kernel_speed;
  out["kernel_t"] = s.kernel_t;
  out["kernel_grid"] = s.kernel_grid;
  out["doeblin_speeds"] = s.doeblin_speeds;
  out["t0"] = s.t0;
  out["doeblin_grid"] = s.doeblin_grid;
  out["mixing_times"] = s.mixing_times;
  return out;
}

}  // namespace bchain
