#include "semra/harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <random>
#include <sstream>

#include "semra/agents/checkpoint.hpp"
#include "semra/common/errors.hpp"
#include "semra/common/io.hpp"
#include "semra/common/rng.hpp"
#include "semra/env/environment.hpp"
#include "semra/sbq/codec.hpp"

#ifndef SEMRA_VERSION
#define SEMRA_VERSION "unknown"
#endif

namespace semra::harness {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { line(header); }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw std::logic_error("csv row width differs from header");
        line(cells);
    }
    const std::string& str() const { return text_; }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }
    std::size_t width_;
    std::string text_;
};

std::string num(double v) { return io::format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Collects events and trace lines; everything lands on disk atomically.
struct Sink {
    fs::path out;
    bool trace = false;
    std::string events;
    std::string trace_lines;

    void event(const json& j) { events += j.dump() + '\n'; }
    void flush() const {
        io::write_atomic(out / "events.jsonl", events);
        if (trace) io::write_atomic(out / "trace.jsonl", trace_lines);
    }
    void trace_step(const char* phase, std::size_t episode, std::size_t step, const env::Action& a,
                    const env::StepOutcome& o) {
        if (!trace) return;
        json j;
        j["phase"] = phase;
        j["episode"] = episode;
        j["step"] = step;
        j["n"] = a.n;
        j["subchannel"] = a.subchannel;
        j["bandwidth_hz"] = a.bandwidth;
        std::vector<double> power(a.n.size(), 0.0);
        for (std::size_t u = 0; u < a.beams.users; ++u)
            for (std::size_t c = 0; c < a.beams.subchannels; ++c)
                for (const auto& f : a.beams.at(u, c)) power[u] += std::norm(f);
        j["power_w"] = power;
        j["reward"] = o.reward;
        j["sc_qos"] = o.metrics.sc_qos;
        std::vector<double> sim;
        for (const auto& u : o.metrics.users) sim.push_back(u.similarity);
        j["similarity"] = sim;
        trace_lines += j.dump() + '\n';
    }
};

std::string metrics_csv(const std::vector<agents::EpisodeLog>& logs) {
    Csv csv({"episode", "mean_reward", "mean_sc_qos", "mean_similarity", "mean_sqe", "mean_latency_s", "mean_n",
             "sac_critic_loss", "sac_actor_loss", "dsac_critic_loss", "dsac_actor_loss", "sac_alpha", "dsac_alpha",
             "compensator_loss", "updates"});
    for (const auto& e : logs)
        csv.row({num(e.episode), num(e.mean_reward), num(e.mean_sc_qos), num(e.mean_similarity), num(e.mean_sqe),
                 num(e.mean_latency), num(e.mean_n), num(e.sac_critic_loss), num(e.sac_actor_loss),
                 num(e.dsac_critic_loss), num(e.dsac_actor_loss), num(e.sac_alpha), num(e.dsac_alpha),
                 num(e.compensator_loss), num(e.updates)});
    return csv.str();
}

Csv steps_header(std::size_t users) {
    std::vector<std::string> h{"episode", "step", "sc_qos", "reward"};
    for (std::size_t u = 0; u < users; ++u)
        for (const char* f : {"n", "subchannel", "bandwidth_hz", "snr_db", "rate_bps", "similarity", "sqe",
                              "effective_sqe", "latency_s"})
            h.push_back("u" + std::to_string(u) + "_" + f);
    return Csv(h);
}

void steps_row(Csv& csv, std::size_t episode, std::size_t step, const env::StepOutcome& o) {
    std::vector<std::string> r{num(episode), num(step), num(o.metrics.sc_qos), num(o.reward)};
    for (const auto& u : o.metrics.users) {
        const double snr_db = u.snr > 0.0 ? 10.0 * std::log10(u.snr) : -std::numeric_limits<double>::infinity();
        for (double v : {static_cast<double>(u.n), static_cast<double>(u.subchannel), u.bandwidth, snr_db, u.rate,
                         u.similarity, u.sqe, u.effective_sqe, u.latency})
            r.push_back(num(v));
    }
    csv.row(r);
}

std::vector<double> episode_means(const std::vector<double>& steps, std::size_t per_episode) {
    std::vector<double> out;
    for (std::size_t i = 0; i + per_episode <= steps.size(); i += per_episode)
        out.push_back(std::accumulate(steps.begin() + static_cast<long>(i),
                                      steps.begin() + static_cast<long>(i + per_episode), 0.0) /
                      static_cast<double>(per_episode));
    return out;
}

double ci95(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double k = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return t_critical_95(xs.size() - 1) * std::sqrt(ss / (k - 1.0) / k);
}

json eval_json(const RunRecord& r) {
    json e;
    e["mean_sc_qos"] = r.eval.mean_sc_qos;
    e["ci95_sc_qos"] = ci95(r.eval_episode_sc_qos);
    e["mean_reward"] = r.eval.mean_reward;
    e["mean_similarity"] = r.eval.mean_similarity;
    e["mean_sqe"] = r.eval.mean_sqe;
    e["mean_latency_s"] = r.eval.mean_latency;
    e["mean_n"] = r.eval.mean_n;
    e["episode_sc_qos"] = r.eval_episode_sc_qos;
    return e;
}

void write_summary(const fs::path& out, const ExperimentConfig& cfg, const RunRecord& r) {
    json s;
    s["policy"] = r.policy;
    s["config_hash"] = hash_hex(r.config_hash);
    s["preset"] = cfg.run.preset;
    s["seed"] = r.seed;
    s["code_version"] = r.code_version;
    s["wall_clock_s"] = r.wall_clock_s;
    s["train_episodes"] = r.episodes.size();
    s["updates"] = r.updates;
    s["eval"] = eval_json(r);
    io::write_atomic(out / "summary.json", s.dump(2) + '\n');

    Csv csv({"policy", "config_hash", "preset", "seed", "mean_sc_qos", "ci95_sc_qos", "mean_reward",
             "mean_similarity", "mean_sqe", "mean_latency_s", "mean_n", "updates", "wall_clock_s"});
    csv.row({r.policy, hash_hex(r.config_hash), cfg.run.preset, std::to_string(r.seed), num(r.eval.mean_sc_qos),
             num(ci95(r.eval_episode_sc_qos)), num(r.eval.mean_reward), num(r.eval.mean_similarity),
             num(r.eval.mean_sqe), num(r.eval.mean_latency), num(r.eval.mean_n), num(r.updates),
             num(r.wall_clock_s)});
    io::write_atomic(out / "summary.csv", csv.str());
}

json start_event(const char* op, const ExperimentConfig& cfg, std::uint64_t seed, const std::string& policy) {
    json j;
    j["event"] = "start";
    j["operation"] = op;
    j["policy"] = policy;
    j["config_hash"] = hash_hex(config_hash(cfg));
    j["preset"] = cfg.run.preset;
    j["seed"] = seed;
    j["code_version"] = code_version();
    return j;
}

// Greedy or baseline evaluation with steps.csv and trace lines.
void evaluate_into(RunRecord& r, const ExperimentConfig& cfg, const agents::TrainedPolicy& p,
                   const agents::Policy& policy, Sink& sink) {
    Csv steps = steps_header(cfg.env.system.users);
    r.eval = agents::evaluate_policy(cfg.env, eval_seed(r.seed), p.compensator, policy, cfg.run.eval_episodes,
                                     cfg.run.eval_steps,
                                     [&](std::size_t ep, std::size_t t, const env::Action& a, const env::StepOutcome& o) {
                                         steps_row(steps, ep, t, o);
                                         sink.trace_step("eval", ep, t, a, o);
                                     });
    r.eval_episode_sc_qos = episode_means(r.eval.step_sc_qos, cfg.run.eval_steps);
    io::write_atomic(sink.out / "steps.csv", steps.str());
    json e = eval_json(r);
    e["event"] = "eval";
    sink.event(e);
}

agents::TrainResult train_logged(const ExperimentConfig& cfg, std::uint64_t seed, Sink& sink) {
    agents::TrainResult result;
    try {
        result = agents::train(cfg.env, cfg.sac(), cfg.dsac(), cfg.trainer(), seed, [&](env::Environment& e) {
            if (sink.trace)
                e.set_trace([&sink](const env::StepTrace& t) {
                    sink.trace_step("train", t.episode, t.step, *t.action, *t.outcome);
                });
        });
    } catch (const TrainingError& e) {
        json j;
        j["event"] = "error";
        j["kind"] = "training";
        j["message"] = e.what();
        sink.event(j);
        sink.flush();
        throw;
    }
    for (const auto& ep : result.episodes) {
        json j;
        j["event"] = "episode";
        j["episode"] = ep.episode;
        j["mean_reward"] = ep.mean_reward;
        j["mean_sc_qos"] = ep.mean_sc_qos;
        j["mean_similarity"] = ep.mean_similarity;
        j["updates"] = ep.updates;
        j["sac_alpha"] = ep.sac_alpha;
        j["dsac_alpha"] = ep.dsac_alpha;
        sink.event(j);
    }
    return result;
}

void finish(RunRecord& r, const ExperimentConfig& cfg, Sink& sink, std::chrono::steady_clock::time_point t0) {
    r.wall_clock_s = elapsed(t0);
    json j;
    j["event"] = "end";
    j["wall_clock_s"] = r.wall_clock_s;
    sink.event(j);
    write_summary(sink.out, cfg, r);
    sink.flush();
}

RunRecord fresh_record(const std::string& policy, const ExperimentConfig& cfg, std::uint64_t seed) {
    RunRecord r;
    r.policy = policy;
    r.config_hash = config_hash(cfg);
    r.seed = seed;
    r.code_version = code_version();
    return r;
}

agents::TrainedPolicy load_policy(const ExperimentConfig& cfg, const fs::path& from, bool force) {
    agents::TrainedPolicy p = blank_policy(cfg);
    agents::load_checkpoint(from / "checkpoint.bin", p, config_hash(cfg), force);
    return p;
}

}  // namespace

std::string code_version() { return SEMRA_VERSION; }

double t_critical_95(std::size_t df) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                   2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                   2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (df == 0) throw DomainError("t_critical_95: needs at least one degree of freedom");
    if (df <= 30) return table[df - 1];
    return 1.96 + 2.4 / static_cast<double>(df);
}

std::uint64_t eval_seed(std::uint64_t seed) { return rng::derive(seed, "eval-env"); }
std::uint64_t calibration_seed(std::uint64_t seed) { return rng::derive(seed, "calibration-env"); }
std::uint64_t baseline_seed(std::uint64_t seed) { return rng::derive(seed, "baseline-policy"); }

agents::TrainedPolicy blank_policy(const ExperimentConfig& cfg) {
    env::Environment e(cfg.env, 0);
    Rng init(0);
    const std::size_t U = e.users();
    return {agents::make_sac(e.state_dim(), e.continuous_dim(), cfg.sac(), init),
            agents::make_dsac(e.state_dim(),
                              agents::hybrid_heads(U, static_cast<std::size_t>(e.levels()), e.subchannels()),
                              cfg.dsac(), init),
            e.compensator()};
}

RunRecord run(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& out, const RunOptions& opts) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out);
    io::write_atomic(out / "config.json", to_json(cfg, 2) + '\n');
    Sink sink{out, opts.trace, {}, {}};
    sink.event(start_event("train", cfg, seed, "adaptive"));

    auto trained = train_logged(cfg, seed, sink);
    RunRecord r = fresh_record("adaptive", cfg, seed);
    r.episodes = trained.episodes;
    r.updates = trained.updates;
    io::write_atomic(out / "metrics.csv", metrics_csv(r.episodes));
    agents::save_checkpoint(out / "checkpoint.bin", trained.policy, r.config_hash);

    evaluate_into(r, cfg, trained.policy, agents::greedy_policy(trained.policy), sink);
    finish(r, cfg, sink, t0);
    return r;
}

RunRecord eval(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& from, const fs::path& out,
               const RunOptions& opts) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto policy = load_policy(cfg, from, opts.force_checkpoint);
    fs::create_directories(out);
    io::write_atomic(out / "config.json", to_json(cfg, 2) + '\n');
    Sink sink{out, opts.trace, {}, {}};
    sink.event(start_event("eval", cfg, seed, "adaptive"));
    RunRecord r = fresh_record("adaptive", cfg, seed);
    evaluate_into(r, cfg, policy, agents::greedy_policy(policy), sink);
    finish(r, cfg, sink, t0);
    return r;
}

static int fixed_level(const std::string& kind, const ExperimentConfig& cfg) {
    int n = 0;
    try {
        n = std::stoi(kind.substr(6));
    } catch (const std::exception&) {
        throw ConfigError("baseline.kind", "fixed-<n> needs an integer level");
    }
    if (n < 1 || n > cfg.env.system.sbq_levels)
        throw ConfigError("baseline.kind", "fixed level must be within 1.." + std::to_string(cfg.env.system.sbq_levels));
    return n;
}

static void check_kind(const std::string& kind, const ExperimentConfig& cfg) {
    if (kind == "adaptive" || kind == "random" || kind == "rate-only" || kind == "mapping-guided" ||
        kind == "mapping-guided-genie")
        return;
    if (kind.rfind("fixed-", 0) == 0) {
        fixed_level(kind, cfg);
        return;
    }
    throw ConfigError("baseline.kind",
                      "unknown baseline '" + kind + "' (random, rate-only, mapping-guided, mapping-guided-genie, fixed-<n>)");
}

agents::Policy make_policy(const std::string& kind, const ExperimentConfig& cfg, std::uint64_t seed,
                           const agents::TrainedPolicy& policy, double bucket_db) {
    if (kind == "adaptive") return agents::greedy_policy(policy);
    if (kind == "random") return agents::random_policy(baseline_seed(seed));
    if (kind == "rate-only") return agents::rate_only_policy(policy, baseline_seed(seed));
    if (kind == "mapping-guided" || kind == "mapping-guided-genie") {
        auto table = std::make_shared<agents::MappingTable>(
            agents::calibrate_mapping(cfg.env, policy, bucket_db, calibration_seed(seed),
                                      cfg.run.calibration_episodes, cfg.run.calibration_steps));
        auto inner = agents::mapping_guided_policy(
            policy, *table, kind == "mapping-guided" ? agents::SnrSource::Previous : agents::SnrSource::Current);
        return [table, inner](const std::vector<double>& s, const env::Environment& e) { return inner(s, e); };
    }
    if (kind.rfind("fixed-", 0) == 0) return agents::fixed_policy(fixed_level(kind, cfg));
    throw ConfigError("baseline.kind",
                      "unknown baseline '" + kind + "' (random, rate-only, mapping-guided, mapping-guided-genie, fixed-<n>)");
}

namespace {

std::string policy_label(const std::string& kind, double bucket_db) {
    if (kind.rfind("mapping-guided", 0) != 0) return kind;
    return kind + "@" + io::format_double(bucket_db) + "dB";
}

}  // namespace

RunRecord evaluate_named(const std::string& kind, const ExperimentConfig& cfg, std::uint64_t seed,
                         const agents::TrainedPolicy& policy, const fs::path& out, const RunOptions& opts) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opts.bucket_db > 0.0)) throw ConfigError("baseline.bucket_db", "must be positive");
    const auto pol = make_policy(kind, cfg, seed, policy, opts.bucket_db);
    const std::string label = policy_label(kind, opts.bucket_db);
    RunRecord r = fresh_record(label, cfg, seed);
    if (out.empty()) {
        r.eval = agents::evaluate_policy(cfg.env, eval_seed(seed), policy.compensator, pol, cfg.run.eval_episodes,
                                         cfg.run.eval_steps);
        r.eval_episode_sc_qos = episode_means(r.eval.step_sc_qos, cfg.run.eval_steps);
        r.wall_clock_s = elapsed(t0);
        return r;
    }
    fs::create_directories(out);
    io::write_atomic(out / "config.json", to_json(cfg, 2) + '\n');
    Sink sink{out, opts.trace, {}, {}};
    sink.event(start_event("baseline", cfg, seed, label));
    evaluate_into(r, cfg, policy, pol, sink);
    finish(r, cfg, sink, t0);
    return r;
}

RunRecord baseline(const std::string& kind, const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& from,
                   const fs::path& out, const RunOptions& opts) {
    cfg.validate();
    check_kind(kind, cfg);
    agents::TrainedPolicy policy;
    if (!from.empty()) {
        policy = load_policy(cfg, from, opts.force_checkpoint);
    } else if (kind == "rate-only" || kind.rfind("mapping-guided", 0) == 0) {
        policy = agents::train(cfg.env, cfg.sac(), cfg.dsac(), cfg.trainer(), seed).policy;
    } else {
        // State-free baselines still need the compensator the agent would use.
        policy = blank_policy(cfg);
        env::Environment scratch(cfg.env, rng::derive(seed, "train-env"));
        if (cfg.drl.freeze_compensator)
            agents::pretrain_compensator(scratch, cfg.env, cfg.drl.pretrain_compensator_batches, seed);
        policy.compensator = scratch.compensator();
    }
    return evaluate_named(kind, cfg, seed, policy, out, opts);
}

std::vector<CompareEntry> compare(const std::vector<fs::path>& dirs) {
    if (dirs.size() < 2) throw ConfigError("compare", "needs at least two run directories");
    std::vector<CompareEntry> out;
    std::string hash;
    for (const auto& d : dirs) {
        json s;
        try {
            s = json::parse(io::read_file(d / "summary.json"));
        } catch (const json::exception& e) {
            throw ConfigError("compare", d.string() + "/summary.json is not valid: " + e.what());
        }
        const std::string h = s.at("config_hash").get<std::string>();
        if (hash.empty()) hash = h;
        if (h != hash)
            throw ConfigError("compare", "config hash mismatch: " + d.string() + " has " + h + ", expected " + hash);
        CompareEntry e;
        e.dir = d.string();
        e.policy = s.at("policy").get<std::string>();
        e.seed = s.at("seed").get<std::uint64_t>();
        const auto eps = s.at("eval").at("episode_sc_qos").get<std::vector<double>>();
        e.mean_sc_qos = s.at("eval").at("mean_sc_qos").get<double>();
        e.ci95 = ci95(eps);
        e.episodes = eps.size();
        out.push_back(e);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const CompareEntry& a, const CompareEntry& b) { return a.mean_sc_qos > b.mean_sc_qos; });
    return out;
}

std::string compare_csv(const std::vector<CompareEntry>& entries) {
    Csv csv({"rank", "policy", "seed", "mean_sc_qos", "ci95_low", "ci95_high", "episodes", "dir"});
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        csv.row({num(i + 1), e.policy, std::to_string(e.seed), num(e.mean_sc_qos), num(e.mean_sc_qos - e.ci95),
                 num(e.mean_sc_qos + e.ci95), num(e.episodes), e.dir});
    }
    return csv.str();
}

SweepResult sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<std::string>& values,
                  const std::vector<std::uint64_t>& seeds, const std::string& policy, const fs::path& out) {
    if (values.empty()) throw ConfigError("sweep.values", "needs at least one value");
    if (seeds.empty()) throw ConfigError("sweep.seeds", "needs at least one seed");
    int level = 0;
    if (policy.rfind("fixed-", 0) == 0) {
        level = fixed_level(policy, base);
    } else if (policy != "trained") {
        throw ConfigError("sweep.policy", "expected 'trained' or 'fixed-<n>'");
    }
    std::vector<ExperimentConfig> cells;
    for (const auto& v : values) cells.push_back(with_field(base, parameter, v));

    SweepResult result{parameter, policy, {}, {}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& cfg = cells[i];
        for (auto seed : seeds) {
            agents::EvalResult ev;
            if (level > 0) {
                env::Environment scratch(cfg.env, rng::derive(seed, "train-env"));
                agents::pretrain_compensator(scratch, cfg.env, cfg.drl.pretrain_compensator_batches, seed);
                ev = agents::evaluate_policy(cfg.env, eval_seed(seed), scratch.compensator(),
                                             agents::fixed_policy(level), cfg.run.eval_episodes,
                                             cfg.run.eval_steps);
            } else {
                auto trained = agents::train(cfg.env, cfg.sac(), cfg.dsac(), cfg.trainer(), seed);
                ev = agents::evaluate_policy(cfg.env, eval_seed(seed), trained.policy.compensator,
                                             agents::greedy_policy(trained.policy), cfg.run.eval_episodes,
                                             cfg.run.eval_steps);
            }
            result.cells.push_back({values[i], seed, ev});
        }
    }

    auto stats = [](const std::vector<double>& xs, double& mean, double& sd) {
        const double k = static_cast<double>(xs.size());
        mean = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        sd = xs.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    };
    for (const auto& v : values) {
        std::vector<double> q, s;
        for (const auto& c : result.cells)
            if (c.value == v) {
                q.push_back(c.eval.mean_sc_qos);
                s.push_back(c.eval.mean_similarity);
            }
        SweepSummary sm;
        sm.value = v;
        sm.seeds = q.size();
        stats(q, sm.mean_sc_qos, sm.std_sc_qos);
        stats(s, sm.mean_similarity, sm.std_similarity);
        result.summary.push_back(sm);
    }

    if (!out.empty()) {
        fs::create_directories(out);
        io::write_atomic(out / "config.json", to_json(base, 2) + '\n');
        Csv cells_csv({"parameter", "value", "seed", "policy", "mean_sc_qos", "mean_reward", "mean_similarity",
                       "mean_sqe", "mean_latency_s", "mean_n"});
        for (const auto& c : result.cells)
            cells_csv.row({parameter, c.value, std::to_string(c.seed), policy, num(c.eval.mean_sc_qos),
                           num(c.eval.mean_reward), num(c.eval.mean_similarity), num(c.eval.mean_sqe),
                           num(c.eval.mean_latency), num(c.eval.mean_n)});
        io::write_atomic(out / "cells.csv", cells_csv.str());
        Csv summary({"parameter", "value", "policy", "seeds", "mean_sc_qos", "std_sc_qos", "mean_similarity",
                     "std_similarity"});
        for (const auto& s : result.summary)
            summary.row({parameter, s.value, policy, num(s.seeds), num(s.mean_sc_qos), num(s.std_sc_qos),
                         num(s.mean_similarity), num(s.std_similarity)});
        io::write_atomic(out / "summary.csv", summary.str());
    }
    return result;
}

std::vector<QuantizerRow> quantizer_report(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t samples,
                                           const fs::path& out) {
    cfg.validate();
    if (samples == 0) throw ConfigError("quantizer.samples", "must be positive");
    Rng rng = rng::make(seed, "quantizer-report");
    std::normal_distribution<double> normal(0.0, cfg.env.source.scale);
    std::vector<double> xs(samples);
    for (auto& x : xs) x = std::abs(normal(rng));
    const double th = sbq::estimate_threshold(xs, cfg.env.system.threshold_strategy);
    const double hi = *std::max_element(xs.begin(), xs.end());
    std::vector<QuantizerRow> rows;
    for (int n = 1; n <= cfg.env.system.sbq_levels; ++n)
        rows.push_back({n, th, sbq::mse_sbq(xs, sbq::SbqConfig{n, th}), sbq::mse_uniform(xs, n, hi)});
    if (!out.empty()) {
        Csv csv({"n", "threshold", "mse_sbq", "mse_uniform", "samples"});
        for (const auto& r : rows)
            csv.row({std::to_string(r.n), num(r.threshold), num(r.mse_sbq), num(r.mse_uniform), num(samples)});
        fs::create_directories(out);
        io::write_atomic(out / "quantizer.csv", csv.str());
    }
    return rows;
}

}  // namespace semra::harness
