#include "semra/env/config.hpp"

#include <cmath>

#include "semra/common/errors.hpp"

namespace semra::env {

void SystemConfig::validate() const {
    if (users == 0) throw ConfigError("system.users", "must be positive");
    if (subchannels < users) throw ConfigError("system.subchannels", "one-to-one matching needs subchannels >= users");
    if (antennas == 0) throw ConfigError("system.antennas", "must be positive");
    if (!std::isfinite(tx_power_dbm)) throw ConfigError("system.tx_power_dbm", "must be finite");
    if (!(bandwidth_hz > 0.0)) throw ConfigError("system.bandwidth_hz", "must be positive");
    if (!(noise_var > 0.0)) throw ConfigError("system.noise_var", "must be positive");
    if (!(noise_factor > 0.0)) throw ConfigError("system.noise_factor", "must be positive");
    if (!(path_loss.reference_distance_m > 0.0)) throw ConfigError("system.path_loss_ref_distance_m", "must be positive");
    if (!std::isfinite(link_gain_db)) throw ConfigError("system.link_gain_db", "must be finite");
    if (!(k_factor >= 0.0)) throw ConfigError("system.k_factor", "must be non-negative");
    if (!(distance_min_m > 0.0)) throw ConfigError("system.distance_min_m", "must be positive");
    if (!(distance_max_m >= distance_min_m)) throw ConfigError("system.distance_max_m", "must be >= distance_min_m");
    if (sbq_levels < 1 || sbq_levels > 16) throw ConfigError("system.sbq_levels", "must be in [1, 16]");
}

void EnvConfig::validate() const {
    system.validate();
    source.validate();
    qos.validate();
    if (items_per_user == 0) throw ConfigError("semantic.items_per_user", "must be positive");
    if (horizon == 0) throw ConfigError("drl.horizon", "must be positive");
    if (compensator_hidden == 0) throw ConfigError("semantic.compensator_hidden", "must be positive");
    if (!(compensator_lr >= 0.0)) throw ConfigError("semantic.compensator_lr", "must be non-negative");
}

}  // namespace semra::env
