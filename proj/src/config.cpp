#include "bidep/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bidep {

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError("key " + key + ": expected a boolean, got '" + value + "'");
}

Real parse_real(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const Real parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": expected an integer, got '" + value +
                      "'");
  }
}

}  // namespace

void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "paths.train") config.train_path = value;
  else if (key == "paths.dev") config.dev_path = value;
  else if (key == "paths.test") config.test_path = value;
  else if (key == "paths.pretrained_vectors") config.pretrained_path = value;
  else if (key == "paths.model_in") config.model_in = value;
  else if (key == "paths.model_out") config.model_out = value;
  else if (key == "paths.output") config.output_path = value;
  else if (key == "paths.pred") config.pred_path = value;
  else if (key == "train.hidden_size")
    config.hidden = static_cast<std::size_t>(parse_int(value, key));
  else if (key == "train.additive_dim")
    config.additive = static_cast<std::size_t>(parse_int(value, key));
  else if (key == "train.channels") config.channels = value;
  else if (key == "train.pretrained_init")
    config.pretrained_init = parse_bool(value, key);
  else if (key == "train.use_pos") config.use_pos = parse_bool(value, key);
  else if (key == "train.directions") {
    try {
      config.directions = direction_from_name(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key " + key + ": " + e.what());
    }
  } else if (key == "train.feed_soft_head")
    config.feed_soft_head = parse_bool(value, key);
  else if (key == "train.soft_head_include_root")
    config.soft_head_include_root = parse_bool(value, key);
  else if (key == "train.lr") config.lr = parse_real(value, key);
  else if (key == "train.lr_grid_start")
    config.lr_grid_start = parse_real(value, key);
  else if (key == "train.lr_grid_count")
    config.lr_grid_count = static_cast<int>(parse_int(value, key));
  else if (key == "train.adam_beta1") config.adam_beta1 = parse_real(value, key);
  else if (key == "train.adam_beta2") config.adam_beta2 = parse_real(value, key);
  else if (key == "train.adam_epsilon")
    config.adam_epsilon = parse_real(value, key);
  else if (key == "train.max_epochs")
    config.max_epochs = static_cast<int>(parse_int(value, key));
  else if (key == "decode.mode") {
    try {
      config.decode = decode_mode_from_name(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key " + key + ": " + e.what());
    }
  } else if (key == "decode.single_root")
    config.single_root = parse_bool(value, key);
  else if (key == "parse.threads")
    config.threads = static_cast<int>(parse_int(value, key));
  else if (key == "seed")
    config.seed = static_cast<std::uint64_t>(parse_int(value, key));
  else
    throw ConfigError("unknown config key: " + key);
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    try {
      apply_config_value(config, trim(stripped.substr(0, eq)),
                         trim(stripped.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

ModelConfig model_config_from(const RunConfig& config) {
  ModelConfig model;
  model.hidden = config.hidden;
  if (config.additive != 0) {
    model.additive = config.additive;
  } else if (config.pretrained_init) {
    model.additive = 300;
  }
  model.directions = config.directions;
  model.feed_soft_head = config.feed_soft_head;
  model.soft_head_include_root = config.soft_head_include_root;

  std::vector<Channel> channels;
  std::istringstream list(config.channels);
  std::string item;
  while (std::getline(list, item, ',')) {
    const std::string name = trim(item);
    if (name.empty()) continue;
    try {
      channels.push_back(channel_from_name(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("train.channels: ") + e.what());
    }
  }
  if (!config.use_pos) {
    channels.erase(std::remove_if(channels.begin(), channels.end(),
                                  [](Channel c) {
                                    return c == Channel::kCpos ||
                                           c == Channel::kFpos;
                                  }),
                   channels.end());
  }
  // Canonical order, duplicates dropped.
  std::sort(channels.begin(), channels.end());
  channels.erase(std::unique(channels.begin(), channels.end()), channels.end());
  if (channels.empty()) {
    throw ConfigError("no active embedding channels after applying use_pos");
  }
  model.channels = std::move(channels);
  return model;
}

TrainConfig train_config_from(const RunConfig& config) {
  TrainConfig train;
  train.lr = config.lr;
  train.lr_grid_start = config.lr_grid_start;
  train.lr_grid_count = config.lr_grid_count;
  train.adam_beta1 = config.adam_beta1;
  train.adam_beta2 = config.adam_beta2;
  train.adam_epsilon = config.adam_epsilon;
  train.max_epochs = config.max_epochs;
  train.seed = config.seed;
  return train;
}

}  // namespace bidep
