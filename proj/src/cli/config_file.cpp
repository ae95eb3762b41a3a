#include "hyt/cli/config_file.hpp"

#include <cstdlib>

namespace hyt::cli {

KeyValues RunConfig::to_kv() const {
  KeyValues kv = model.to_kv();
  for (auto& [k, v] : train.to_kv()) kv[k] = v;
  kv["eval.ties"] = std::string(eval::to_string(ties));
  kv["eval.threads"] = kv_str(eval_threads);
  return kv;
}

void RunConfig::apply(const KeyValues& kv) {
  const auto known = to_kv();
  for (const auto& [k, v] : kv)
    if (!known.contains(k)) throw ConfigError("unknown setting '" + k + "'");
  try {
    model.apply(kv);
    train.apply(kv);
    if (auto it = kv.find("eval.ties"); it != kv.end()) ties = eval::parse_tie_policy(it->second);
    kv_get(kv, "eval.threads", eval_threads);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void RunConfig::validate() const {
  try {
    model.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (eval_threads == 0) throw ConfigError("eval.threads must be at least 1");
}

KeyValues parse_overrides(const std::vector<std::string>& items) {
  KeyValues kv;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + item + "' is not key=value");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

void apply_ablation(RunConfig& cfg, const std::string& name) {
  if (name == "entity-ln") cfg.model.use_entity_ln = false;
  else if (name == "entity-dropout") cfg.model.use_entity_dropout = false;
  else if (name == "relation-ln") cfg.model.use_relation_ln = false;
  else throw ConfigError("unknown ablation '" + name + "' (entity-ln, entity-dropout, relation-ln)");
}

std::filesystem::path resolve_data_path(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::exists(p)) return p;
  if (const char* root = std::getenv("HYT_DATA_ROOT"); root && *root && p.is_relative()) {
    auto under = std::filesystem::path(root) / p;
    if (std::filesystem::exists(under)) return under;
  }
  throw ConfigError("data path '" + path + "' does not exist");
}

}  // namespace hyt::cli
