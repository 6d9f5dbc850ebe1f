#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "auvsim/grid.hpp"

namespace auvsim {

// The robot's map estimate. Starts all-unknown; a cell only ever holds the map
// content it had when it was last sensed or received.
struct BeliefGrid {
    int n = 0;
    std::vector<Cell> cells;

    explicit BeliefGrid(int side = 0)
        : n(side), cells(static_cast<size_t>(side) * side, Cell::unknown) {}
    Cell at(Coord x) const { return cells[static_cast<size_t>(x.r - 1) * n + (x.c - 1)]; }
    Cell& at(Coord x) { return cells[static_cast<size_t>(x.r - 1) * n + (x.c - 1)]; }
};

// Per-cell age of information. `sentinel` (= K+1) doubles as the never-observed
// value and the clamp ceiling, so network inputs stay in [0,1] after dividing
// by it.
struct AgeGrid {
    int n = 0;
    uint16_t sentinel = 101;
    std::vector<uint16_t> age;

    explicit AgeGrid(int side = 0, uint16_t sentinel_value = 101)
        : n(side),
          sentinel(sentinel_value),
          age(static_cast<size_t>(side) * side, sentinel_value) {}
    uint16_t at(Coord x) const { return age[static_cast<size_t>(x.r - 1) * n + (x.c - 1)]; }
    uint16_t& at(Coord x) { return age[static_cast<size_t>(x.r - 1) * n + (x.c - 1)]; }
};

// Square-block partition of the map into C areas, row-major from the
// bottom-left. In the distributed setup sensor g's field of view is block g,
// so the centralized and distributed systems carry the same information.
struct SensorLayout {
    int n = 0;
    int num_areas = 0;       // C
    int blocks_per_side = 0; // sqrt(C)
    int block_side = 0;      // N / sqrt(C)

    struct Rect {
        int c0, c1, r0, r1;  // inclusive, 1-based
    };
    Rect area(int g) const {
        int br = g / blocks_per_side, bc = g % blocks_per_side;
        return {bc * block_side + 1, (bc + 1) * block_side,
                br * block_side + 1, (br + 1) * block_side};
    }
    std::pair<double, double> area_center(int g) const {
        Rect a = area(g);
        return {0.5 * (a.c0 + a.c1), 0.5 * (a.r0 + a.r1)};
    }
    int area_of(Coord x) const {
        return ((x.r - 1) / block_side) * blocks_per_side + (x.c - 1) / block_side;
    }
};

// Throws ConfigError unless sqrt(num_areas) is an integer dividing n.
SensorLayout partition_map(int n, int num_areas);

// Every previously observed cell ages by one slot; never-observed cells stay at
// the sentinel. Called once per slot before any sensing.
void age_tick(AgeGrid& age);

// Refresh every cell within Euclidean distance v_robot of x from the true map.
void sense_local(BeliefGrid& b, AgeGrid& age, const GridMap& m, Coord x, int v_robot);

// Centralized channel: the chosen area always arrives.
void apply_centralized_tx(BeliefGrid& b, AgeGrid& age, const GridMap& m,
                          const SensorLayout& lay, int area);

// Omniscient bypass: the full map arrives.
void apply_full_map_tx(BeliefGrid& b, AgeGrid& age, const GridMap& m);

struct CommOutcome {
    std::vector<int> transmitters;  // sensors with a_g = 1
    bool collision = false;        // two or more transmitters
    int delivered_area = -1;       // -1 nothing, -2 full map, else area index
};

// Collision channel: the transmission goes through only when exactly one
// sensor speaks; two or more collide and nothing is delivered.
CommOutcome apply_distributed_tx(BeliefGrid& b, AgeGrid& age, const GridMap& m,
                                 const SensorLayout& lay,
                                 const std::vector<uint8_t>& actions);

// Sensor g's private view: the true map inside its field of view, unknown
// elsewhere. full_map = the centralized sensor.
std::vector<Cell> sensor_view(const GridMap& m, const SensorLayout& lay, int g, bool full_map);

// Per-sensor reward for the comm slot at the start of the window: -eta for each
// colliding transmitter, otherwise the robot's reward summed over the K_p+1
// slots [k, k+K_p]. The window must be exactly comm_period+1 entries
// (zero-padded when the episode ends early).
std::vector<double> sensor_reward(const std::vector<uint8_t>& actions,
                                  const std::vector<double>& robot_rewards_window,
                                  double eta, int comm_period);

}  // namespace auvsim
