#pragma once

#include <cstddef>

#include "semra/phy/link.hpp"
#include "semra/phy/transport.hpp"
#include "semra/qos/metrics.hpp"
#include "semra/sbq/codec.hpp"
#include "semra/semantic/source.hpp"

namespace semra::env {

struct SystemConfig {
    std::size_t users = 3;
    std::size_t subchannels = 3;
    std::size_t antennas = 6;
    double tx_power_dbm = -10.0;
    double bandwidth_hz = 90e3;
    double noise_var = 0.01;
    double noise_factor = 1.0;  // multiplies noise_var
    phy::PathLossModel path_loss;
    // Aggregate antenna / processing gain added to the path gain, dB.
    double link_gain_db = 60.0;
    double k_factor = 2.0;
    double distance_min_m = 20.0;
    double distance_max_m = 100.0;
    int sbq_levels = 3;
    sbq::ThresholdStrategy threshold_strategy = sbq::ThresholdStrategy::Median;
    phy::TransportMode transport = phy::TransportMode::MonteCarlo;

    double tx_power_w() const { return phy::dbm_to_watts(tx_power_dbm); }
    void validate() const;
};

struct EnvConfig {
    SystemConfig system;
    semantic::SourceConfig source;
    qos::QosWeights qos;
    std::size_t items_per_user = 8;
    std::size_t horizon = 200;
    std::size_t compensator_hidden = 512;
    double compensator_lr = 2e-3;
    bool cumulative_reward_in_state = false;

    void validate() const;
};

}  // namespace semra::env
