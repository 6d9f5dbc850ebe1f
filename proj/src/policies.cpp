#include "auvsim/policies.hpp"

namespace auvsim {

Strategy strategy_from_name(std::string_view name) {
    if (name == "rc") return Strategy::rc;
    if (name == "cc") return Strategy::cc;
    if (name == "oc") return Strategy::oc;
    if (name == "cjcc") return Strategy::cjcc;
    if (name == "djcc") return Strategy::djcc;
    throw ConfigError("unknown strategy: " + std::string(name));
}

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::rc: return "rc";
        case Strategy::cc: return "cc";
        case Strategy::oc: return "oc";
        case Strategy::cjcc: return "cjcc";
        case Strategy::djcc: return "djcc";
    }
    return "?";
}

int rc_policy(RngStream& rng, int num_areas) { return rng.uniform_int(0, num_areas - 1); }

int cc_policy(Coord xl, const SensorLayout& lay) {
    int best = 0;
    double best_d2 = 0.0;
    for (int g = 0; g < lay.num_areas; ++g) {
        auto [cc, cr] = lay.area_center(g);
        double dc = xl.c - cc, dr = xl.r - cr;
        double d2 = dc * dc + dr * dr;
        if (g == 0 || d2 < best_d2) {
            best = g;
            best_d2 = d2;
        }
    }
    return best;
}

SensorPolicy make_rc_sensor(RngStream* rng) {
    SensorPolicy p;
    p.centralized = [rng](const SensorContext& ctx) {
        return rc_policy(*rng, ctx.layout->num_areas);
    };
    return p;
}

SensorPolicy make_cc_sensor() {
    SensorPolicy p;
    p.centralized = [](const SensorContext& ctx) { return cc_policy(ctx.robot_pos, *ctx.layout); };
    return p;
}

SensorPolicy make_oc_sensor() { return {}; }

RobotPolicy greedy_policy(const ValueNet* net) {
    return [net](const ObservationStack& obs) {
        std::vector<float> q = net->forward(obs);
        return argmax_index(q.data(), static_cast<int>(q.size()));
    };
}

SensorPolicy make_net_sensor_centralized(const ValueNet* net) {
    SensorPolicy p;
    p.centralized = [net](const SensorContext& ctx) {
        std::vector<float> q = net->forward(ctx.observation(0));
        return argmax_index(q.data(), static_cast<int>(q.size()));
    };
    return p;
}

SensorPolicy make_net_sensor_distributed(std::span<const ValueNet> nets) {
    SensorPolicy p;
    p.distributed = [nets](const SensorContext& ctx, std::vector<uint8_t>& actions) {
        for (size_t g = 0; g < actions.size(); ++g) {
            std::vector<float> q = nets[g].forward(ctx.observation(static_cast<int>(g)));
            actions[g] = static_cast<uint8_t>(argmax_index(q.data(), static_cast<int>(q.size())));
        }
    };
    return p;
}

}  // namespace auvsim
