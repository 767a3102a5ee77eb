#pragma once

// Experiment configuration: five JSON sections (system, semantic, qos, drl,
// run) on top of a named preset. Unknown keys and type mismatches throw
// ConfigError naming the dotted field path.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "semra/agents/dsac.hpp"
#include "semra/agents/sac.hpp"
#include "semra/agents/trainer.hpp"
#include "semra/env/config.hpp"

namespace semra::harness {

struct DrlSettings {
    std::vector<std::size_t> hidden{512, 512, 512};
    double learning_rate = 1e-4;
    double alpha_learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.97;
    double weight_decay = 5e-4;
    double gamma = 0.99;
    double tau = 5e-3;
    double sac_target_entropy = -1.0;
    double dsac_target_entropy = -1.0;
    double init_alpha = 1.0;
    bool learn_alpha = true;
    agents::TemperatureForm dsac_temperature_form = agents::TemperatureForm::Literal;
    std::size_t batch_size = 256;
    std::size_t replay_capacity = 20000;
    std::size_t episodes = 200;
    std::size_t updates_per_step = 1;
    std::size_t target_interval = 1;
    std::size_t random_steps = 0;
    double reward_scale = 1.0;
    bool freeze_compensator = false;
    std::size_t compensator_batches = 1;
    std::size_t pretrain_compensator_batches = 200;
    bool shared_replay = true;
};

struct RunSettings {
    std::string preset = "paper";
    std::size_t eval_episodes = 4;
    std::size_t eval_steps = 50;
    std::size_t calibration_episodes = 40;
    std::size_t calibration_steps = 50;
};

struct ExperimentConfig {
    env::EnvConfig env;
    DrlSettings drl;
    RunSettings run;

    agents::SacConfig sac() const;
    agents::DsacConfig dsac() const;
    agents::TrainerConfig trainer() const;
    void validate() const;
};

std::vector<std::string> preset_names();
// Throws ConfigError("preset", ...) for an unknown name.
ExperimentConfig preset(std::string_view name);

// Overlays `json_text` on the preset it names ("run": {"preset": ...}), or on
// `fallback_preset` when it names none. An explicit `forced_preset` wins over both.
ExperimentConfig parse_config(std::string_view json_text, std::string_view fallback_preset = "desk",
                              std::string_view forced_preset = {});
ExperimentConfig load_config(const std::filesystem::path& path, std::string_view fallback_preset = "desk",
                             std::string_view forced_preset = {});

// Sorted keys, every field present, shortest round-trip numbers.
std::string to_json(const ExperimentConfig& cfg, int indent = -1);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

// Sets one dotted field ("system.tx_power_dbm") from its JSON text and
// revalidates. Throws ConfigError for unknown paths or bad values.
ExperimentConfig with_field(const ExperimentConfig& cfg, std::string_view path, std::string_view json_value);

}  // namespace semra::harness
