// semra command line: train | eval | sweep | baseline | compare | quantizer-report.
// Exit codes: 0 success, 2 configuration or usage error, 3 training error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "semra/common/errors.hpp"
#include "semra/common/io.hpp"
#include "semra/harness/config.hpp"
#include "semra/harness/run.hpp"

namespace fs = std::filesystem;
using namespace semra;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTraining = 3;

struct Common {
    std::string config;
    std::string preset;
    std::uint64_t seed = 1;
    std::string out;
    bool trace = false;
    bool freeze = false;
};

void add_common(CLI::App* app, Common& c, bool needs_out) {
    app->add_option("--config", c.config, "JSON experiment config");
    app->add_option("--preset", c.preset, "base preset")->check(CLI::IsMember({"paper", "desk", "smoke"}));
    app->add_option("--seed", c.seed, "master seed")->capture_default_str();
    auto* out = app->add_option("--out", c.out, "output directory");
    if (needs_out) out->required();
    app->add_flag("--trace", c.trace, "write trace.jsonl with every environment step");
    app->add_flag("--freeze-compensator", c.freeze, "pretrain the compensator once and keep it fixed");
}

harness::ExperimentConfig resolve(const Common& c, const std::string& from = {}) {
    harness::ExperimentConfig cfg;
    if (!c.config.empty()) {
        cfg = harness::load_config(c.config, "desk", c.preset);
    } else if (c.preset.empty() && !from.empty()) {
        cfg = harness::load_config(fs::path(from) / "config.json");
    } else {
        cfg = harness::preset(c.preset.empty() ? "desk" : c.preset);
    }
    if (c.freeze) cfg.drl.freeze_compensator = true;
    cfg.validate();
    return cfg;
}

void print_record(const harness::RunRecord& r, const std::string& out) {
    std::printf("%s seed %llu: mean SC-QoS %s (similarity %s, latency %s s, n %s) in %.1f s -> %s\n",
                r.policy.c_str(), static_cast<unsigned long long>(r.seed), io::format_double(r.eval.mean_sc_qos).c_str(),
                io::format_double(r.eval.mean_similarity).c_str(), io::format_double(r.eval.mean_latency).c_str(),
                io::format_double(r.eval.mean_n).c_str(), r.wall_clock_s, out.c_str());
}

std::vector<std::string> split_values(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic resource allocation experiments"};
    app.set_version_flag("--version", harness::code_version());
    app.require_subcommand(1);

    Common train_c;
    auto* train = app.add_subcommand("train", "train the agents, then evaluate them greedily");
    add_common(train, train_c, true);

    Common eval_c;
    std::string eval_from;
    bool eval_force = false;
    auto* eval = app.add_subcommand("eval", "greedy evaluation of a trained run");
    add_common(eval, eval_c, true);
    eval->add_option("--from", eval_from, "run directory holding checkpoint.bin")->required();
    eval->add_flag("--force", eval_force, "load a checkpoint whose config hash differs");

    Common base_c;
    std::string base_kind, base_from;
    double bucket_db = 5.0;
    bool base_force = false;
    auto* base = app.add_subcommand("baseline", "evaluate a baseline policy");
    add_common(base, base_c, true);
    base->add_option("--kind", base_kind, "random, rate-only, mapping-guided or fixed-<n>")->required();
    base->add_option("--from", base_from, "run directory whose trained agents the baseline reuses");
    base->add_option("--bucket-db", bucket_db, "mapping-guided SNR bucket width in dB")->capture_default_str();
    base->add_flag("--force", base_force, "load a checkpoint whose config hash differs");

    Common sweep_c;
    std::string sweep_param, sweep_values, sweep_policy = "trained";
    std::vector<std::uint64_t> sweep_seeds;
    auto* sw = app.add_subcommand("sweep", "grid over one config field and several seeds");
    add_common(sw, sweep_c, true);
    sw->add_option("--param", sweep_param, "dotted field, e.g. system.tx_power_dbm")->required();
    sw->add_option("--values", sweep_values, "comma-separated JSON values")->required();
    sw->add_option("--seeds", sweep_seeds, "seeds (default: --seed)");
    sw->add_option("--policy", sweep_policy, "trained or fixed-<n>")->capture_default_str();

    std::vector<std::string> cmp_dirs;
    std::string cmp_out;
    auto* cmp = app.add_subcommand("compare", "rank runs by mean SC-QoS");
    cmp->add_option("dirs", cmp_dirs, "run directories")->required();
    cmp->add_option("--out", cmp_out, "directory for compare.csv");

    Common q_c;
    std::size_t q_samples = 100000;
    auto* qr = app.add_subcommand("quantizer-report", "SBQ against the uniform quantizer");
    add_common(qr, q_c, true);
    qr->add_option("--samples", q_samples, "half-normal samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*train) {
            const auto cfg = resolve(train_c);
            print_record(harness::run(cfg, train_c.seed, train_c.out, {train_c.trace, false}), train_c.out);
        } else if (*eval) {
            const auto cfg = resolve(eval_c, eval_from);
            print_record(harness::eval(cfg, eval_c.seed, eval_from, eval_c.out, {eval_c.trace, eval_force}),
                         eval_c.out);
        } else if (*base) {
            const auto cfg = resolve(base_c, base_from);
            print_record(harness::baseline(base_kind, cfg, base_c.seed, base_from, base_c.out,
                                           {base_c.trace, base_force, bucket_db}),
                         base_c.out);
        } else if (*sw) {
            const auto cfg = resolve(sweep_c);
            if (sweep_seeds.empty()) sweep_seeds.push_back(sweep_c.seed);
            const auto r = harness::sweep(cfg, sweep_param, split_values(sweep_values), sweep_seeds, sweep_policy,
                                          sweep_c.out);
            for (const auto& s : r.summary)
                std::printf("%s = %s: SC-QoS %s +- %s, similarity %s +- %s over %zu seeds\n", r.parameter.c_str(),
                            s.value.c_str(), io::format_double(s.mean_sc_qos).c_str(),
                            io::format_double(s.std_sc_qos).c_str(), io::format_double(s.mean_similarity).c_str(),
                            io::format_double(s.std_similarity).c_str(), s.seeds);
        } else if (*cmp) {
            std::vector<fs::path> dirs(cmp_dirs.begin(), cmp_dirs.end());
            const auto entries = harness::compare(dirs);
            const auto csv = harness::compare_csv(entries);
            std::cout << csv;
            if (!cmp_out.empty()) io::write_atomic(fs::path(cmp_out) / "compare.csv", csv);
        } else if (*qr) {
            const auto cfg = resolve(q_c);
            for (const auto& r : harness::quantizer_report(cfg, q_c.seed, q_samples, q_c.out))
                std::printf("n=%d threshold %s: SBQ MSE %s, uniform MSE %s\n", r.n,
                            io::format_double(r.threshold).c_str(), io::format_double(r.mse_sbq).c_str(),
                            io::format_double(r.mse_uniform).c_str());
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitConfig;
    } catch (const TrainingError& e) {
        std::fprintf(stderr, "training error: %s\n", e.what());
        return kExitTraining;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
