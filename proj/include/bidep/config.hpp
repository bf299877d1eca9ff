// Run configuration: a line-oriented "key = value" file with dotted keys,
// mirrored one-to-one by CLI flags. Unknown keys are rejected.
#pragma once

#include <stdexcept>
#include <string>

#include "bidep/model.hpp"
#include "bidep/parse_run.hpp"
#include "bidep/trainer.hpp"

namespace bidep {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // paths.*
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string pretrained_path;
  std::string model_in;
  std::string model_out;
  std::string output_path;
  std::string pred_path;

  // train.* (model architecture and optimizer)
  std::size_t hidden = 64;
  std::size_t additive = 0;  // 0 = derived: 300 with pretrained init, else d
  std::string channels = "form,fpos";
  bool pretrained_init = false;
  bool use_pos = true;
  Direction directions = Direction::kBoth;
  bool feed_soft_head = true;
  bool soft_head_include_root = true;
  Real lr = 0.001;
  Real lr_grid_start = 0;
  int lr_grid_count = 0;
  Real adam_beta1 = 0.9;
  Real adam_beta2 = 0.999;
  Real adam_epsilon = 1e-8;
  int max_epochs = 50;

  // decode.* / parse.*
  DecodeMode decode = DecodeMode::kMst;
  bool single_root = false;
  int threads = 1;

  std::uint64_t seed = 1;
};

// Applies one key/value pair; throws ConfigError for unknown keys or
// unparsable values.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

// Reads a config file; errors carry "path:line:".
void load_config_file(RunConfig& config, const std::string& path);

// Resolves the architecture: channel list (with the use_pos ablation applied)
// and the additive dimension rule.
ModelConfig model_config_from(const RunConfig& config);
TrainConfig train_config_from(const RunConfig& config);

}  // namespace bidep
