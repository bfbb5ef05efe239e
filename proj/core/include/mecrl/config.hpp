#pragma once

// Experiment configuration as a JSON document. Every field is optional;
// missing ones take the defaults below and unknown keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mecrl/agents.hpp"
#include "mecrl/mec_env.hpp"
#include "mecrl/trainer.hpp"

namespace mecrl::harness {

struct ExperimentConfig {
  env::EnvConfig env = env::EnvConfig::with_defaults(2);
  agents::TrainerConfig trainer;
  agents::Algo algo = agents::Algo::rmaddpg;
  std::size_t episodes = 1000;
  std::size_t n_runs = 5;
  std::uint64_t base_seed = 1;
  std::filesystem::path out_dir = "out";

  void validate() const;
};

// Throws ValidationError naming the offending key.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Throws ParseError carrying line and column on malformed text.
ExperimentConfig parse_config(const std::string& text);

// Reads and validates a config file; IoError if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

// Writes the fully resolved config to out_dir/resolved_config.json.
void write_resolved_config(const ExperimentConfig& cfg);

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace mecrl::harness
