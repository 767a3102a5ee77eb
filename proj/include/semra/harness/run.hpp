#pragma once

// Harness operations. Each writes its artifacts atomically under `out`;
// file formats are described in docs/formats.md.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semra/agents/trainer.hpp"
#include "semra/harness/config.hpp"

namespace semra::harness {

std::string code_version();

struct RunOptions {
    bool trace = false;
    bool force_checkpoint = false;  // load checkpoints whose config hash differs
    double bucket_db = 5.0;         // mapping-guided SNR bucket width
};

struct RunRecord {
    std::string policy;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<agents::EpisodeLog> episodes;  // empty for evaluation-only runs
    std::size_t updates = 0;
    agents::EvalResult eval;
    std::vector<double> eval_episode_sc_qos;
    double wall_clock_s = 0.0;
    std::string code_version;
};

// Shell with the right shapes for `cfg`, for checkpoint loading.
agents::TrainedPolicy blank_policy(const ExperimentConfig& cfg);

// Sub-streams of the master seed used for evaluation and baselines.
std::uint64_t eval_seed(std::uint64_t seed);
std::uint64_t calibration_seed(std::uint64_t seed);
std::uint64_t baseline_seed(std::uint64_t seed);

// Train, then evaluate greedily. Writes config.json, metrics.csv, steps.csv,
// events.jsonl, summary.json, summary.csv, checkpoint.bin (and trace.jsonl).
RunRecord run(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out,
              const RunOptions& opts = {});

// Greedy evaluation of the checkpoint in `from` (a run directory).
RunRecord eval(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& from,
               const std::filesystem::path& out, const RunOptions& opts = {});

// kind: random, rate-only, mapping-guided, mapping-guided-genie, fixed-1 .. fixed-N. The agent-backed
// kinds use the checkpoint in `from`, or train one in-process when `from` is empty.
RunRecord baseline(const std::string& kind, const ExperimentConfig& cfg, std::uint64_t seed,
                   const std::filesystem::path& from, const std::filesystem::path& out, const RunOptions& opts = {});

// Evaluates an already trained policy under the usual evaluation seed and
// writes the same artifacts as baseline().
RunRecord evaluate_named(const std::string& kind, const ExperimentConfig& cfg, std::uint64_t seed,
                         const agents::TrainedPolicy& policy, const std::filesystem::path& out,
                         const RunOptions& opts = {});
agents::Policy make_policy(const std::string& kind, const ExperimentConfig& cfg, std::uint64_t seed,
                           const agents::TrainedPolicy& policy, double bucket_db = 5.0);

struct CompareEntry {
    std::string dir;
    std::string policy;
    std::uint64_t seed = 0;
    double mean_sc_qos = 0.0;
    double ci95 = 0.0;  // half-width over evaluation episodes (Student t)
    std::size_t episodes = 0;
};

// Reads summary.json from each directory; throws ConfigError when the config
// hashes differ. Entries come back sorted by mean SC-QoS, best first.
std::vector<CompareEntry> compare(const std::vector<std::filesystem::path>& dirs);
std::string compare_csv(const std::vector<CompareEntry>& entries);

struct SweepCell {
    std::string value;  // JSON text as given
    std::uint64_t seed = 0;
    agents::EvalResult eval;
};

struct SweepSummary {
    std::string value;
    std::size_t seeds = 0;
    double mean_sc_qos = 0.0;
    double std_sc_qos = 0.0;
    double mean_similarity = 0.0;
    double std_similarity = 0.0;
};

struct SweepResult {
    std::string parameter;
    std::string policy;
    std::vector<SweepCell> cells;
    std::vector<SweepSummary> summary;  // in the order of `values`
};

// policy "trained" trains one agent per cell and evaluates it greedily;
// "fixed-n" evaluates fixed_policy(n) with a pretrained compensator. Writes
// cells.csv and summary.csv when `out` is non-empty.
SweepResult sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<std::string>& values,
                  const std::vector<std::uint64_t>& seeds, const std::string& policy,
                  const std::filesystem::path& out);

// SBQ against the plain uniform quantizer on half-normal samples at the
// source scale, per level; writes quantizer.csv.
struct QuantizerRow {
    int n = 0;
    double threshold = 0.0;
    double mse_sbq = 0.0;
    double mse_uniform = 0.0;
};
std::vector<QuantizerRow> quantizer_report(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t samples,
                                           const std::filesystem::path& out);

// Two-sided 95% Student t critical value for `df` degrees of freedom.
double t_critical_95(std::size_t df);

}  // namespace semra::harness
