#include "auvsim/perception.hpp"

#include <cmath>

namespace auvsim {

SensorLayout partition_map(int n, int num_areas) {
    int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(num_areas))));
    if (side * side != num_areas)
        throw ConfigError("num_areas must be a perfect square, got " + std::to_string(num_areas));
    if (n % side != 0)
        throw ConfigError("sqrt(num_areas) must divide map_size (" + std::to_string(side) +
                          " does not divide " + std::to_string(n) + ")");
    SensorLayout lay;
    lay.n = n;
    lay.num_areas = num_areas;
    lay.blocks_per_side = side;
    lay.block_side = n / side;
    return lay;
}

void age_tick(AgeGrid& age) {
    for (auto& a : age.age) {
        if (a < age.sentinel) ++a;  // the sentinel is also the clamp ceiling
    }
}

void sense_local(BeliefGrid& b, AgeGrid& age, const GridMap& m, Coord x, int v_robot) {
    const int n = m.n;
    const int v2 = v_robot * v_robot;
    const int c_lo = std::max(1, x.c - v_robot), c_hi = std::min(n, x.c + v_robot);
    const int r_lo = std::max(1, x.r - v_robot), r_hi = std::min(n, x.r + v_robot);
    for (int r = r_lo; r <= r_hi; ++r) {
        for (int c = c_lo; c <= c_hi; ++c) {
            int dc = c - x.c, dr = r - x.r;
            if (dc * dc + dr * dr <= v2) {
                b.at({c, r}) = m.at({c, r});
                age.at({c, r}) = 0;
            }
        }
    }
}

namespace {

void deliver_rect(BeliefGrid& b, AgeGrid& age, const GridMap& m, SensorLayout::Rect rect) {
    for (int r = rect.r0; r <= rect.r1; ++r) {
        for (int c = rect.c0; c <= rect.c1; ++c) {
            b.at({c, r}) = m.at({c, r});
            age.at({c, r}) = 0;
        }
    }
}

}  // namespace

void apply_centralized_tx(BeliefGrid& b, AgeGrid& age, const GridMap& m,
                          const SensorLayout& lay, int area) {
    if (area < 0 || area >= lay.num_areas)
        throw std::logic_error("transmission area index out of range");
    deliver_rect(b, age, m, lay.area(area));
}

void apply_full_map_tx(BeliefGrid& b, AgeGrid& age, const GridMap& m) {
    b.cells = m.cells;
    std::fill(age.age.begin(), age.age.end(), uint16_t{0});
}

CommOutcome apply_distributed_tx(BeliefGrid& b, AgeGrid& age, const GridMap& m,
                                 const SensorLayout& lay,
                                 const std::vector<uint8_t>& actions) {
    CommOutcome out;
    for (size_t g = 0; g < actions.size(); ++g) {
        if (actions[g]) out.transmitters.push_back(static_cast<int>(g));
    }
    if (out.transmitters.size() == 1) {
        int g = out.transmitters.front();
        deliver_rect(b, age, m, lay.area(g));
        out.delivered_area = g;
    } else if (out.transmitters.size() >= 2) {
        out.collision = true;
    }
    return out;
}

std::vector<Cell> sensor_view(const GridMap& m, const SensorLayout& lay, int g, bool full_map) {
    if (full_map) return m.cells;
    std::vector<Cell> view(m.cells.size(), Cell::unknown);
    auto rect = lay.area(g);
    for (int r = rect.r0; r <= rect.r1; ++r) {
        for (int c = rect.c0; c <= rect.c1; ++c) {
            view[static_cast<size_t>(r - 1) * m.n + (c - 1)] = m.at({c, r});
        }
    }
    return view;
}

std::vector<double> sensor_reward(const std::vector<uint8_t>& actions,
                                  const std::vector<double>& robot_rewards_window,
                                  double eta, int comm_period) {
    if (static_cast<int>(robot_rewards_window.size()) != comm_period + 1)
        throw std::logic_error("sensor reward window must have K_p + 1 entries");
    double window_sum = 0.0;
    for (double r : robot_rewards_window) window_sum += r;
    int transmitters = 0;
    for (uint8_t a : actions) transmitters += a ? 1 : 0;

    std::vector<double> rewards(actions.size());
    for (size_t g = 0; g < actions.size(); ++g) {
        rewards[g] = (actions[g] && transmitters >= 2) ? -eta : window_sum;
    }
    return rewards;
}

}  // namespace auvsim
