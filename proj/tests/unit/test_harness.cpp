#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "semra/agents/checkpoint.hpp"
#include "semra/common/errors.hpp"
#include "semra/common/io.hpp"
#include "semra/harness/config.hpp"
#include "semra/harness/run.hpp"

using namespace semra;
using namespace semra::harness;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("semra_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) { return io::read_file(p); }

// Number of comma-separated cells per line; every line must agree.
void check_csv_shape(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line;
    REQUIRE(std::getline(in, line));
    const auto width = std::count(line.begin(), line.end(), ',');
    CHECK(line.find_first_of("0123456789") != 0);  // header, not data
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == width);
        ++rows;
    }
    CHECK(rows > 0);
}

// Random perturbation of one field, in JSON text; may be invalid.
std::string perturb(const json& v, Rng& rng) {
    std::uniform_real_distribution<double> f(0.5, 1.5);
    if (v.is_boolean()) return v.get<bool>() ? "false" : "true";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::size_t>() + rng() % 3);
    if (v.is_number_integer()) return std::to_string(v.get<long long>() + static_cast<long long>(rng() % 3));
    if (v.is_number_float()) return json(v.get<double>() * f(rng)).dump();
    return v.dump();
}

}  // namespace

TEST_CASE("presets carry the intended values") {
    const auto paper = preset("paper");
    CHECK(paper.env.system.users == 3);
    CHECK(paper.env.system.subchannels == 3);
    CHECK(paper.env.system.antennas == 6);
    CHECK(paper.env.system.tx_power_dbm == -10.0);
    CHECK(paper.env.system.bandwidth_hz == 90e3);
    CHECK(paper.env.system.path_loss.exponent == 3.0);
    CHECK(paper.env.system.noise_var == 0.01);
    CHECK(paper.env.system.path_loss.reference_gain_db == 30.0);
    CHECK(paper.env.system.path_loss.reference_distance_m == 1.0);
    CHECK(paper.env.system.sbq_levels == 3);
    CHECK(paper.drl.gamma == 0.99);
    CHECK(paper.drl.tau == 5e-3);
    CHECK(paper.drl.sac_target_entropy == -1.0);
    CHECK(paper.drl.dsac_target_entropy == -1.0);
    CHECK(paper.drl.replay_capacity == 20000);
    CHECK(paper.drl.learning_rate == 1e-4);
    CHECK(paper.env.qos.omega_im == 1.0);
    CHECK(paper.env.qos.omega_g == 10.0);
    CHECK(paper.env.qos.bonus == 3.0);
    CHECK(paper.run.preset == "paper");

    const auto desk = preset("desk");
    CHECK(desk.drl.gamma == 0.9);
    CHECK(desk.drl.hidden == std::vector<std::size_t>{64, 64});
    CHECK(desk.env.qos.im_th == 0.9);
    CHECK(desk.drl.freeze_compensator);
    CHECK(desk.drl.episodes == 150);
    CHECK(desk.run.calibration_episodes == 40);
    CHECK(preset("smoke").run.preset == "smoke");
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
    CHECK_THROWS_AS(preset("laptop"), ConfigError);
}

TEST_CASE("config round trip is the identity") {
    for (const auto& name : preset_names()) {
        const auto c = preset(name);
        const auto text = to_json(c);
        const auto back = parse_config(text);
        CHECK(to_json(back) == text);
        CHECK(config_hash(back) == config_hash(c));
        CHECK(to_json(parse_config(to_json(c, 2))) == text);
    }
}

TEST_CASE("config round trip property over random perturbations") {
    Rng rng(17);
    const json fields = json::parse(to_json(preset("desk")));
    std::vector<std::string> paths;
    for (const auto& [section, body] : fields.items())
        for (const auto& [key, _] : body.items())
            if (section != "run" || key != "preset") paths.push_back(section + "." + key);

    std::size_t accepted = 0;
    for (int trial = 0; trial < 300; ++trial) {
        ExperimentConfig c = preset("desk");
        for (int k = 0; k < 4; ++k) {
            const auto& path = paths[rng() % paths.size()];
            const auto dot = path.find('.');
            const json current = json::parse(to_json(c))[path.substr(0, dot)][path.substr(dot + 1)];
            try {
                c = with_field(c, path, perturb(current, rng));
            } catch (const ConfigError&) {
            }
        }
        const auto text = to_json(c);
        const auto back = parse_config(text);
        CHECK(to_json(back) == text);
        CHECK(config_hash(back) == config_hash(c));
        if (text != to_json(preset("desk"))) ++accepted;
    }
    CHECK(accepted > 200);
}

TEST_CASE("config hash ignores key order and tracks values") {
    const auto c = preset("desk");
    const json j = json::parse(to_json(c));
    nlohmann::ordered_json reversed;
    std::vector<std::string> sections;
    for (const auto& [s, _] : j.items()) sections.insert(sections.begin(), s);
    for (const auto& s : sections) {
        std::vector<std::string> keys;
        for (const auto& [k, _] : j[s].items()) keys.insert(keys.begin(), k);
        for (const auto& k : keys) reversed[s][k] = j[s][k];
    }
    CHECK(config_hash(parse_config(reversed.dump())) == config_hash(c));
    CHECK(config_hash(with_field(c, "system.tx_power_dbm", "0")) != config_hash(c));
    CHECK(hash_hex(0x1234) == "0000000000001234");
}

TEST_CASE("partial configs overlay their preset") {
    const auto c = parse_config(R"({"run": {"preset": "smoke"}, "system": {"tx_power_dbm": 0}})");
    CHECK(c.run.preset == "smoke");
    CHECK(c.env.system.tx_power_dbm == 0.0);
    CHECK(c.drl.episodes == preset("smoke").drl.episodes);
    CHECK(parse_config("{}").run.preset == "desk");
    CHECK(parse_config("{}", "paper").run.preset == "paper");
    CHECK(parse_config(R"({"run": {"preset": "smoke"}})", "desk", "paper").run.preset == "paper");
}

TEST_CASE("config errors name the field") {
    auto field_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(R"({"system": {"userz": 3}})") == "system.userz");
    CHECK(field_of(R"({"hardware": {}})") == "hardware");
    CHECK(field_of(R"({"drl": {"gamma": "high"}})") == "drl.gamma");
    CHECK(field_of(R"({"drl": {"batch_size": -4}})") == "drl.batch_size");
    CHECK(field_of(R"({"drl": {"hidden": [64, -1]}})") == "drl.hidden[1]");
    CHECK(field_of(R"({"system": {"users": 0}})") == "system.users");
    CHECK(field_of(R"({"system": {"transport": "carrier-pigeon"}})") == "system.transport");
    CHECK(field_of(R"({"system": 3})") == "system");
    CHECK(field_of("[1, 2]") == "");
    CHECK(field_of("{not json") == "");
    CHECK(field_of(R"({"run": {"preset": "nope"}})") == "preset");
    CHECK_THROWS_AS(load_config("/definitely/missing.json"), ConfigError);
    CHECK_THROWS_AS(with_field(preset("desk"), "system.nope", "1"), ConfigError);
    CHECK_THROWS_AS(with_field(preset("desk"), "nodot", "1"), ConfigError);
}

TEST_CASE("atomic writes replace the target and leave no temporary") {
    const auto dir = scratch_dir("atomic");
    io::write_atomic(dir / "a.txt", "first");
    io::write_atomic(dir / "a.txt", "second");
    CHECK(slurp(dir / "a.txt") == "second");
    CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
    io::write_atomic(dir / "nested" / "b.txt", "x");
    CHECK(slurp(dir / "nested" / "b.txt") == "x");
}

TEST_CASE("format_double round trips") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("checkpoint round trip and refusals") {
    const auto cfg = preset("smoke");
    const auto dir = scratch_dir("ckpt");
    auto trained = agents::train(cfg.env, cfg.sac(), cfg.dsac(), cfg.trainer(), 5);
    const auto h = config_hash(cfg);
    agents::save_checkpoint(dir / "c.bin", trained.policy, h);
    CHECK(agents::checkpoint_hash(dir / "c.bin") == h);
    CHECK(slurp(dir / "c.bin").substr(0, 6) == "SEMRA1");

    auto loaded = blank_policy(cfg);
    agents::load_checkpoint(dir / "c.bin", loaded, h);
    CHECK(agents::serialize_checkpoint(loaded, h) == agents::serialize_checkpoint(trained.policy, h));
    const auto a = agents::evaluate_policy(cfg.env, 9, trained.policy.compensator,
                                           agents::greedy_policy(trained.policy), 1, 10);
    const auto b = agents::evaluate_policy(cfg.env, 9, loaded.compensator, agents::greedy_policy(loaded), 1, 10);
    CHECK(a.step_sc_qos == b.step_sc_qos);

    auto other = blank_policy(cfg);
    CHECK_THROWS_AS(agents::load_checkpoint(dir / "c.bin", other, h + 1), ConfigError);
    CHECK_NOTHROW(agents::load_checkpoint(dir / "c.bin", other, h + 1, true));

    auto bigger_cfg = with_field(cfg, "drl.hidden", "[8, 8]");
    auto bigger = blank_policy(bigger_cfg);
    CHECK_THROWS_AS(agents::load_checkpoint(dir / "c.bin", bigger, h, true), FramingError);

    const std::string bytes = slurp(dir / "c.bin");
    io::write_atomic(dir / "trunc.bin", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(agents::load_checkpoint(dir / "trunc.bin", other, h), FramingError);
    io::write_atomic(dir / "magic.bin", "SEMRA0" + bytes.substr(6));
    CHECK_THROWS_AS(agents::load_checkpoint(dir / "magic.bin", other, h), FramingError);
    io::write_atomic(dir / "trail.bin", bytes + "x");
    CHECK_THROWS_AS(agents::load_checkpoint(dir / "trail.bin", other, h), FramingError);
}

TEST_CASE("same config and seed give byte-identical metrics") {
    const auto cfg = preset("smoke");
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    const auto t0 = std::chrono::steady_clock::now();
    run(cfg, 4, a);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 300.0);
    run(cfg, 4, b);
    for (const char* f : {"metrics.csv", "steps.csv", "summary.csv", "checkpoint.bin", "config.json"}) {
        INFO(f);
        if (std::string(f) == "summary.csv") continue;  // carries wall clock
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto c = scratch_dir("det_c");
    run(cfg, 5, c);
    CHECK(slurp(a / "metrics.csv") != slurp(c / "metrics.csv"));
}

TEST_CASE("run writes every artifact with a header and constant width") {
    const auto cfg = preset("smoke");
    const auto dir = scratch_dir("artifacts");
    const auto r = run(cfg, 2, dir, RunOptions{true, false});
    for (const char* f : {"config.json", "metrics.csv", "steps.csv", "events.jsonl", "summary.json", "summary.csv",
                          "checkpoint.bin", "trace.jsonl"})
        CHECK(fs::exists(dir / f));
    for (const char* f : {"metrics.csv", "steps.csv", "summary.csv"}) {
        INFO(f);
        check_csv_shape(dir / f);
    }
    CHECK(r.episodes.size() == cfg.drl.episodes);
    CHECK(r.eval.step_sc_qos.size() == cfg.run.eval_episodes * cfg.run.eval_steps);
    CHECK(r.config_hash == config_hash(cfg));

    std::istringstream events(slurp(dir / "events.jsonl"));
    std::string line, first, last;
    std::size_t n = 0;
    while (std::getline(events, line)) {
        if (n++ == 0) first = line;
        last = line;
        CHECK(json::accept(line));
    }
    CHECK(json::parse(first)["event"] == "start");
    CHECK(json::parse(last)["event"] == "end");
    std::istringstream trace(slurp(dir / "trace.jsonl"));
    std::size_t lines = 0;
    while (std::getline(trace, line)) ++lines;
    CHECK(lines == cfg.drl.episodes * cfg.env.horizon + cfg.run.eval_episodes * cfg.run.eval_steps);
    CHECK(json::parse(slurp(dir / "config.json")) == json::parse(to_json(cfg)));

    const auto ev = eval(cfg, 2, dir, scratch_dir("artifacts_eval"));
    CHECK(ev.eval.step_sc_qos == r.eval.step_sc_qos);
}

TEST_CASE("baselines share the evaluation environment and compare ranks them") {
    const auto cfg = preset("smoke");
    const auto root = scratch_dir("compare");
    run(cfg, 1, root / "adaptive");
    std::vector<fs::path> dirs{root / "adaptive"};
    for (const std::string kind : {"random", "rate-only", "mapping-guided", "fixed-3"}) {
        baseline(kind, cfg, 1, root / "adaptive", root / kind);
        dirs.push_back(root / kind);
        check_csv_shape(root / kind / "steps.csv");
    }
    const auto entries = compare(dirs);
    REQUIRE(entries.size() == 5);
    for (std::size_t i = 1; i < entries.size(); ++i) CHECK(entries[i - 1].mean_sc_qos >= entries[i].mean_sc_qos);
    for (const auto& e : entries) CHECK(e.ci95 >= 0.0);
    const auto csv = compare_csv(entries);
    CHECK(csv.rfind("rank,policy,seed,mean_sc_qos,ci95_low,ci95_high,episodes,dir\n", 0) == 0);

    run(with_field(cfg, "system.tx_power_dbm", "0"), 1, root / "other");
    CHECK_THROWS_AS(compare({root / "adaptive", root / "other"}), ConfigError);
    CHECK_THROWS_AS(compare({root / "adaptive"}), ConfigError);
    CHECK_THROWS_AS(baseline("oracle", cfg, 1, {}, root / "x"), ConfigError);
    CHECK_THROWS_AS(baseline("fixed-9", cfg, 1, {}, root / "x"), ConfigError);
    CHECK_THROWS_AS(eval(with_field(cfg, "system.tx_power_dbm", "0"), 1, root / "adaptive", root / "y"),
                    ConfigError);
}

TEST_CASE("baseline without a run directory trains or pretrains as needed") {
    const auto cfg = preset("smoke");
    const auto r = baseline("random", cfg, 3, {}, scratch_dir("free_random"));
    CHECK(r.policy == "random");
    const auto m = baseline("mapping-guided", cfg, 3, {}, scratch_dir("free_mapping"));
    CHECK(m.policy == "mapping-guided@5dB");
}

TEST_CASE("fixed-level noise sweep lowers similarity") {
    auto cfg = preset("smoke");
    cfg.run.eval_steps = 20;
    const auto r = sweep(cfg, "system.noise_factor", {"1", "4", "16", "64"}, {1, 2}, "fixed-3",
                         scratch_dir("sweep"));
    REQUIRE(r.summary.size() == 4);
    for (std::size_t i = 1; i < r.summary.size(); ++i)
        CHECK(r.summary[i].mean_similarity < r.summary[i - 1].mean_similarity);
    CHECK(r.cells.size() == 8);
    check_csv_shape(fs::temp_directory_path() / "semra_test_sweep" / "cells.csv");
    CHECK_THROWS_AS(sweep(cfg, "system.nope", {"1"}, {1}, "fixed-3", {}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, "system.noise_factor", {"1"}, {1}, "greedy", {}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, "system.noise_factor", {}, {1}, "fixed-3", {}), ConfigError);
}

TEST_CASE("quantizer report favours SBQ at two and three bits") {
    const auto rows = quantizer_report(preset("smoke"), 1, 100000, scratch_dir("quant"));
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows)
        if (r.n >= 2) CHECK(r.mse_sbq < r.mse_uniform);
    check_csv_shape(fs::temp_directory_path() / "semra_test_quant" / "quantizer.csv");
}

TEST_CASE("t critical values") {
    CHECK(t_critical_95(1) == doctest::Approx(12.706));
    CHECK(t_critical_95(3) == doctest::Approx(3.182));
    CHECK(t_critical_95(1000) == doctest::Approx(1.96).epsilon(0.01));
    CHECK_THROWS_AS(t_critical_95(0), DomainError);
}
