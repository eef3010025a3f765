#include <algorithm>

#include "chaoslab/harness/run.hpp"

namespace chaoslab::harness {

const std::vector<std::pair<std::string, std::string>>& builtin_configs() {
  static const std::vector<std::pair<std::string, std::string>> configs = {
#include "builtin_configs.inc"
  };
  return configs;
}

ExperimentConfig builtin_config(const std::string& name) {
  const auto& all = builtin_configs();
  const auto it = std::find_if(all.begin(), all.end(), [&](const auto& kv) { return kv.first == name; });
  if (it == all.end()) throw ConfigError("no built-in config named '" + name + "'");
  return parse_config(it->second, "builtin:" + name);
}

}  // namespace chaoslab::harness
