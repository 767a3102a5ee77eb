#pragma once

// Binary container: "SEMRA1", u64 config hash, u64 array count, then per
// array u64 rows, u64 cols and rows*cols little-endian doubles. Arrays follow
// the declared order: SAC actor, critic 1, critic 2, target 1, target 2,
// log-alpha; the same six for D-SAC; then the compensator.

#include <cstdint>
#include <filesystem>
#include <string>

#include "semra/agents/trainer.hpp"

namespace semra::agents {

inline constexpr char kCheckpointMagic[] = "SEMRA1";

std::string serialize_checkpoint(const TrainedPolicy& p, std::uint64_t config_hash);
void save_checkpoint(const std::filesystem::path& path, const TrainedPolicy& p, std::uint64_t config_hash);

// Fills `into`, whose shapes must already match (build it from the same config).
// Throws ConfigError on a hash mismatch unless `force`, FramingError on a
// malformed or shape-mismatched file.
void load_checkpoint(const std::filesystem::path& path, TrainedPolicy& into, std::uint64_t expected_hash,
                     bool force = false);
std::uint64_t checkpoint_hash(const std::filesystem::path& path);

}  // namespace semra::agents
