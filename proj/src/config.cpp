#include "hpmine/config.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "hpmine/constraint_cnl.hpp"

namespace hpmine {

namespace fs = std::filesystem;

Config::Config() : triggers(Triggers::default_patterns()) {}

bool glob_match(const std::string& pattern, const std::string& name) {
  return fnmatch(pattern.c_str(), name.c_str(), 0) == 0;
}

bool Config::selects(const std::string& class_name) const {
  bool in = std::any_of(include.begin(), include.end(), [&](const auto& p) { return glob_match(p, class_name); });
  bool out = std::any_of(exclude.begin(), exclude.end(), [&](const auto& p) { return glob_match(p, class_name); });
  return in && !out;
}

namespace {

std::vector<std::string> string_list(const Json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be a list of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw ConfigError("config key '" + key + "' must be a list of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

fs::path path_value(const Json& v, const std::string& key, const fs::path& base) {
  if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError("config key '" + key + "' must be a path string");
  fs::path p = v.get<std::string>();
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

Config Config::from_json(const Json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = *it;
    if (k == "library") {
      if (!v.is_string()) throw ConfigError("config key 'library' must be a string");
      c.library = v.get<std::string>();
    } else if (k == "include") {
      c.include = string_list(v, k);
    } else if (k == "exclude") {
      c.exclude = string_list(v, k);
    } else if (k == "triggers") {
      c.triggers = string_list(v, k);
      for (const auto& t : c.triggers) {
        try {
          std::regex re(t, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
          throw ConfigError("trigger pattern '" + t + "' is not a valid regular expression");
        }
      }
    } else if (k == "optimizer_blocklist") {
      c.refine.optimizer_blocklist = string_list(v, k);
    } else if (k == "loguniform_names") {
      c.refine.loguniform_names = string_list(v, k);
    } else if (k == "distribution_ratio") {
      if (!v.is_number() || v.get<double>() <= 1) throw ConfigError("config key 'distribution_ratio' must be a number above 1");
      c.refine.distribution_ratio = v.get<double>();
    } else if (k == "overrides") {
      c.overrides = path_value(v, k, base);
    } else if (k == "observations") {
      c.observations = path_value(v, k, base);
    } else if (k == "output") {
      c.output = path_value(v, k, base);
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  return c;
}

Config Config::load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + file.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, fs::absolute(file).parent_path());
}

}  // namespace hpmine
