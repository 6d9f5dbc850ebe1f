#pragma once

#include <span>
#include <string_view>

#include "auvsim/learner.hpp"

namespace auvsim {

// RC/CC/OC fix the sensor side (networked-control baselines); CJCC and DJCC
// train it jointly with the robot.
enum class Strategy { rc, cc, oc, cjcc, djcc };

Strategy strategy_from_name(std::string_view name);  // throws ConfigError
std::string_view strategy_name(Strategy s);

inline ChannelMode channel_mode_of(Strategy s) {
    switch (s) {
        case Strategy::oc: return ChannelMode::oc_bypass;
        case Strategy::djcc: return ChannelMode::distributed;
        default: return ChannelMode::centralized;
    }
}

// Uniformly random transmission area, independent across comm slots.
int rc_policy(RngStream& rng, int num_areas);

// The area whose center is closest to the robot; lowest index on ties.
int cc_policy(Coord xl, const SensorLayout& lay);

SensorPolicy make_rc_sensor(RngStream* rng);
SensorPolicy make_cc_sensor();
SensorPolicy make_oc_sensor();  // never consulted: the oc bypass handles delivery

// Greedy wrappers over trained value networks (evaluation-time, epsilon = 0).
RobotPolicy greedy_policy(const ValueNet* net);
SensorPolicy make_net_sensor_centralized(const ValueNet* net);
SensorPolicy make_net_sensor_distributed(std::span<const ValueNet> nets);

}  // namespace auvsim
