#include "wsal/instance_json.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wsal {

void to_json(nlohmann::json& j, const InstanceSpec& s) {
  j = nlohmann::json{{"family", to_string(s.family)}, {"nu", s.nu},     {"weak_mode", to_string(s.weak_mode)},
                     {"g", s.g},                      {"p", s.p},       {"beta", s.beta},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, InstanceSpec& s) {
  if (!j.is_object()) throw std::invalid_argument("instance spec must be a JSON object");
  static const std::set<std::string> known{"family", "nu", "weak_mode", "g", "p", "beta", "seed"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw std::invalid_argument("unknown instance key: " + item.key());
  }
  if (j.contains("family")) s.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("nu")) s.nu = j.at("nu").get<double>();
  if (j.contains("weak_mode")) s.weak_mode = weak_mode_from_string(j.at("weak_mode").get<std::string>());
  if (j.contains("g")) s.g = j.at("g").get<double>();
  if (j.contains("p")) s.p = j.at("p").get<double>();
  if (j.contains("beta")) s.beta = j.at("beta").get<double>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
}

std::vector<InstanceSpec> parse_instances(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<InstanceSpec> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(item.get<InstanceSpec>());
  } else {
    out.push_back(j.get<InstanceSpec>());
  }
  if (out.empty()) throw std::invalid_argument("instance file holds no specs");
  return out;
}

std::vector<InstanceSpec> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instances(ss.str());
}

}  // namespace wsal
