#include "semra/harness/config.hpp"

#include <cstdio>
#include <json.hpp>
#include <set>

#include "semra/common/errors.hpp"
#include "semra/common/io.hpp"
#include "semra/common/rng.hpp"

namespace semra::harness {

using json = nlohmann::json;

namespace {

template <typename E>
struct EnumNames;

template <>
struct EnumNames<sbq::ThresholdStrategy> {
    static constexpr std::pair<sbq::ThresholdStrategy, const char*> table[] = {
        {sbq::ThresholdStrategy::Median, "median"}, {sbq::ThresholdStrategy::Mean, "mean"}};
};
template <>
struct EnumNames<phy::TransportMode> {
    static constexpr std::pair<phy::TransportMode, const char*> table[] = {
        {phy::TransportMode::MonteCarlo, "monte-carlo"}, {phy::TransportMode::AnalyticFlip, "analytic-flip"}};
};
template <>
struct EnumNames<agents::TemperatureForm> {
    static constexpr std::pair<agents::TemperatureForm, const char*> table[] = {
        {agents::TemperatureForm::Literal, "literal"}, {agents::TemperatureForm::EntropyTarget, "entropy-target"}};
};

template <typename T>
constexpr bool is_enum_v = std::is_enum_v<T>;

// Every serialized field, in one place. f(section, key, member).
template <typename C, typename F>
void visit_fields(C& c, F&& f) {
    auto& s = c.env.system;
    f("system", "users", s.users);
    f("system", "subchannels", s.subchannels);
    f("system", "antennas", s.antennas);
    f("system", "tx_power_dbm", s.tx_power_dbm);
    f("system", "bandwidth_hz", s.bandwidth_hz);
    f("system", "noise_var", s.noise_var);
    f("system", "noise_factor", s.noise_factor);
    f("system", "path_loss_ref_db", s.path_loss.reference_gain_db);
    f("system", "reference_distance_m", s.path_loss.reference_distance_m);
    f("system", "path_loss_exponent", s.path_loss.exponent);
    f("system", "link_gain_db", s.link_gain_db);
    f("system", "k_factor", s.k_factor);
    f("system", "distance_min_m", s.distance_min_m);
    f("system", "distance_max_m", s.distance_max_m);
    f("system", "sbq_levels", s.sbq_levels);
    f("system", "threshold_strategy", s.threshold_strategy);
    f("system", "transport", s.transport);

    auto& e = c.env;
    f("semantic", "embedding_len", e.source.embedding_len);
    f("semantic", "catalog_size", e.source.catalog_size);
    f("semantic", "zipf_exponent", e.source.zipf_exponent);
    f("semantic", "scale", e.source.scale);
    f("semantic", "items_per_user", e.items_per_user);
    f("semantic", "compensator_hidden", e.compensator_hidden);
    f("semantic", "compensator_lr", e.compensator_lr);

    auto& q = c.env.qos;
    f("qos", "phi_g", q.phi_g);
    f("qos", "omega_im", q.omega_im);
    f("qos", "omega_g", q.omega_g);
    f("qos", "bonus", q.bonus);
    f("qos", "im_th", q.im_th);
    f("qos", "g_th", q.g_th);
    f("qos", "latency_scale", q.latency_scale);
    f("qos", "latency_cap", q.latency_cap);
    f("qos", "literal_punishments", q.literal_punishments);

    auto& d = c.drl;
    f("drl", "hidden", d.hidden);
    f("drl", "learning_rate", d.learning_rate);
    f("drl", "alpha_learning_rate", d.alpha_learning_rate);
    f("drl", "beta1", d.beta1);
    f("drl", "beta2", d.beta2);
    f("drl", "weight_decay", d.weight_decay);
    f("drl", "gamma", d.gamma);
    f("drl", "tau", d.tau);
    f("drl", "sac_target_entropy", d.sac_target_entropy);
    f("drl", "dsac_target_entropy", d.dsac_target_entropy);
    f("drl", "init_alpha", d.init_alpha);
    f("drl", "learn_alpha", d.learn_alpha);
    f("drl", "dsac_temperature_form", d.dsac_temperature_form);
    f("drl", "batch_size", d.batch_size);
    f("drl", "replay_capacity", d.replay_capacity);
    f("drl", "episodes", d.episodes);
    f("drl", "updates_per_step", d.updates_per_step);
    f("drl", "target_interval", d.target_interval);
    f("drl", "random_steps", d.random_steps);
    f("drl", "reward_scale", d.reward_scale);
    f("drl", "freeze_compensator", d.freeze_compensator);
    f("drl", "compensator_batches", d.compensator_batches);
    f("drl", "pretrain_compensator_batches", d.pretrain_compensator_batches);
    f("drl", "shared_replay", d.shared_replay);
    f("drl", "cumulative_reward_in_state", e.cumulative_reward_in_state);

    auto& r = c.run;
    f("run", "preset", r.preset);
    f("run", "horizon", e.horizon);
    f("run", "eval_episodes", r.eval_episodes);
    f("run", "eval_steps", r.eval_steps);
    f("run", "calibration_episodes", r.calibration_episodes);
    f("run", "calibration_steps", r.calibration_steps);
}

template <typename T>
json encode(const T& v) {
    if constexpr (is_enum_v<T>) {
        for (const auto& [val, name] : EnumNames<T>::table)
            if (val == v) return name;
        throw std::logic_error("enum value without a name");
    } else {
        return json(v);
    }
}

template <typename T>
void decode(const json& j, T& out, const std::string& path) {
    auto bad = [&](const char* what) { throw ConfigError(path, std::string("expected ") + what); };
    if constexpr (std::is_same_v<T, bool>) {
        if (!j.is_boolean()) bad("a boolean");
        out = j.get<bool>();
    } else if constexpr (std::is_same_v<T, std::size_t>) {
        if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
            bad("a non-negative integer");
        out = j.get<std::size_t>();
    } else if constexpr (std::is_same_v<T, int>) {
        if (!j.is_number_integer()) bad("an integer");
        out = j.get<int>();
    } else if constexpr (std::is_same_v<T, double>) {
        if (!j.is_number()) bad("a number");
        out = j.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!j.is_string()) bad("a string");
        out = j.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
        if (!j.is_array()) bad("an array of layer widths");
        std::vector<std::size_t> v;
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::size_t x = 0;
            decode(j[i], x, path + "[" + std::to_string(i) + "]");
            v.push_back(x);
        }
        out = std::move(v);
    } else if constexpr (is_enum_v<T>) {
        if (!j.is_string()) bad("a string");
        const auto s = j.get<std::string>();
        std::string names;
        for (const auto& [val, name] : EnumNames<T>::table) {
            if (s == name) {
                out = val;
                return;
            }
            names += names.empty() ? name : std::string(", ") + name;
        }
        throw ConfigError(path, "unknown value '" + s + "' (one of: " + names + ")");
    } else {
        static_assert(sizeof(T) == 0, "unsupported config field type");
    }
}

json to_json_value(const ExperimentConfig& cfg) {
    json root = json::object();
    visit_fields(cfg, [&](const char* section, const char* key, const auto& v) { root[section][key] = encode(v); });
    return root;
}

void overlay(ExperimentConfig& cfg, const json& root) {
    if (!root.is_object()) throw ConfigError("", "top level must be a JSON object");
    std::set<std::string> known;
    visit_fields(cfg, [&](const char* section, const char* key, auto& member) {
        known.insert(std::string(section) + "." + key);
        known.insert(section);
        const auto sec = root.find(section);
        if (sec == root.end()) return;
        if (!sec->is_object()) throw ConfigError(section, "expected an object");
        const auto it = sec->find(key);
        if (it == sec->end()) return;
        decode(*it, member, std::string(section) + "." + key);
    });
    for (const auto& [section, body] : root.items()) {
        if (!known.count(section)) throw ConfigError(section, "unknown section");
        for (const auto& [key, _] : body.items())
            if (!known.count(section + "." + key)) throw ConfigError(section + "." + key, "unknown key");
    }
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

agents::SacConfig ExperimentConfig::sac() const {
    agents::SacConfig c;
    c.hidden = drl.hidden;
    c.optimizer.learning_rate = drl.learning_rate;
    c.optimizer.beta1 = drl.beta1;
    c.optimizer.beta2 = drl.beta2;
    c.optimizer.weight_decay = drl.weight_decay;
    c.alpha_lr = drl.alpha_learning_rate;
    c.gamma = drl.gamma;
    c.tau = drl.tau;
    c.target_entropy = drl.sac_target_entropy;
    c.init_alpha = drl.init_alpha;
    c.learn_alpha = drl.learn_alpha;
    return c;
}

agents::DsacConfig ExperimentConfig::dsac() const {
    agents::DsacConfig c;
    c.hidden = drl.hidden;
    c.optimizer.learning_rate = drl.learning_rate;
    c.optimizer.beta1 = drl.beta1;
    c.optimizer.beta2 = drl.beta2;
    c.optimizer.weight_decay = drl.weight_decay;
    c.alpha_lr = drl.alpha_learning_rate;
    c.gamma = drl.gamma;
    c.tau = drl.tau;
    c.target_entropy = drl.dsac_target_entropy;
    c.init_alpha = drl.init_alpha;
    c.learn_alpha = drl.learn_alpha;
    c.temperature_form = drl.dsac_temperature_form;
    return c;
}

agents::TrainerConfig ExperimentConfig::trainer() const {
    agents::TrainerConfig t;
    t.episodes = drl.episodes;
    t.batch_size = drl.batch_size;
    t.replay_capacity = drl.replay_capacity;
    t.updates_per_step = drl.updates_per_step;
    t.target_interval = drl.target_interval;
    t.random_steps = drl.random_steps;
    t.compensator_batches = drl.compensator_batches;
    t.freeze_compensator = drl.freeze_compensator;
    t.pretrain_compensator_batches = drl.pretrain_compensator_batches;
    t.shared_replay = drl.shared_replay;
    t.reward_scale = drl.reward_scale;
    return t;
}

void ExperimentConfig::validate() const {
    env.validate();
    if (drl.hidden.empty()) throw ConfigError("drl.hidden", "needs at least one hidden layer");
    for (auto h : drl.hidden)
        if (h == 0) throw ConfigError("drl.hidden", "layer widths must be positive");
    sac().validate();
    dsac().validate();
    trainer().validate();
    if (run.eval_episodes == 0) throw ConfigError("run.eval_episodes", "must be positive");
    if (run.eval_steps == 0) throw ConfigError("run.eval_steps", "must be positive");
    if (run.calibration_episodes == 0) throw ConfigError("run.calibration_episodes", "must be positive");
    if (run.calibration_steps == 0) throw ConfigError("run.calibration_steps", "must be positive");
    if (run.preset.empty()) throw ConfigError("run.preset", "must name the base preset");
}

std::vector<std::string> preset_names() { return {"paper", "desk", "smoke"}; }

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig c;
    if (name == "paper") {
        c.run.eval_steps = c.env.horizon;
        return c;
    }
    if (name != "desk" && name != "smoke") throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");

    // Desk scale: one CPU, minutes per run.
    c.run.preset = "desk";
    c.env.horizon = 50;
    c.env.compensator_hidden = 128;
    c.env.qos.phi_g = 100.0;
    c.env.qos.im_th = 0.9;
    c.drl.hidden = {64, 64};
    c.drl.learning_rate = 1e-3;
    c.drl.alpha_learning_rate = 1e-3;
    c.drl.gamma = 0.9;
    c.drl.init_alpha = 0.1;
    c.drl.batch_size = 64;
    c.drl.episodes = 150;
    c.drl.random_steps = 500;
    c.drl.reward_scale = 0.0101;
    c.drl.freeze_compensator = true;
    c.run.eval_episodes = 10;
    c.run.eval_steps = 50;
    if (name == "desk") return c;

    c.run.preset = "smoke";
    c.env.horizon = 10;
    c.env.compensator_hidden = 16;
    c.env.source.catalog_size = 32;
    c.drl.hidden = {16, 16};
    c.drl.batch_size = 16;
    c.drl.episodes = 3;
    c.drl.random_steps = 20;
    c.drl.replay_capacity = 1000;
    c.drl.pretrain_compensator_batches = 10;
    c.run.eval_episodes = 1;
    c.run.eval_steps = 10;
    c.run.calibration_episodes = 1;
    c.run.calibration_steps = 10;
    return c;
}

ExperimentConfig parse_config(std::string_view json_text, std::string_view fallback_preset,
                              std::string_view forced_preset) {
    const json root = parse_json(json_text);
    std::string base(fallback_preset);
    if (root.is_object() && root.contains("run") && root["run"].is_object() && root["run"].contains("preset")) {
        if (!root["run"]["preset"].is_string()) throw ConfigError("run.preset", "expected a string");
        base = root["run"]["preset"].get<std::string>();
    }
    if (!forced_preset.empty()) base = forced_preset;
    ExperimentConfig cfg = preset(base);
    overlay(cfg, root);
    cfg.run.preset = base;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::string_view fallback_preset,
                             std::string_view forced_preset) {
    if (!std::filesystem::exists(path)) throw ConfigError("config", "file not found: " + path.string());
    return parse_config(io::read_file(path), fallback_preset, forced_preset);
}

std::string to_json(const ExperimentConfig& cfg, int indent) { return to_json_value(cfg).dump(indent); }

std::uint64_t config_hash(const ExperimentConfig& cfg) { return rng::fnv1a(to_json(cfg)); }

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig with_field(const ExperimentConfig& cfg, std::string_view path, std::string_view json_value) {
    const auto dot = path.find('.');
    if (dot == std::string_view::npos) throw ConfigError(std::string(path), "expected section.key");
    const std::string section(path.substr(0, dot));
    const std::string key(path.substr(dot + 1));
    json patch = json::object();
    patch[section][key] = parse_json(json_value);
    ExperimentConfig out = cfg;
    overlay(out, patch);
    out.validate();
    return out;
}

}  // namespace semra::harness
