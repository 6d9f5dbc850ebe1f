#pragma once

#include <functional>
#include <string>
#include <vector>

#include "auvsim/grid.hpp"
#include "auvsim/perception.hpp"

namespace auvsim {

// Network input image, c x N x N with values in [0,1]. Channel legend:
//   0  belief grid, cell codes scaled to {0, 1/3, 2/3, 1} for {unknown, free,
//      obstacle, target}
//   1  age grid / (K+1)
//   2  one-hot robot position
//   3  one-hot goal position
//   4  sensor's own map view, same encoding as channel 0 (sensor stacks only)
// Stored in categorical form and materialized to floats at the network input.
struct ObservationStack {
    int n = 0;
    int channels = 4;
    uint16_t age_denom = 101;  // K + 1
    std::vector<uint8_t> belief;   // n*n cell codes
    std::vector<uint16_t> age;     // n*n, clamped to K+1
    uint8_t xl_c = 1, xl_r = 1, xf_c = 1, xf_r = 1;
    std::vector<uint8_t> view;     // empty for robot stacks

    size_t input_size() const { return static_cast<size_t>(channels) * n * n; }
    void write_floats(float* dst) const;
    std::vector<float> to_floats() const;
    bool operator==(const ObservationStack&) const = default;
};

inline float cell_code(Cell c) { return static_cast<float>(static_cast<int>(c)) / 3.0f; }

// Sensors may act only when k is a multiple of K_p; every slot is a movement slot.
bool is_comm_slot(int k, int comm_period);

ObservationStack build_robot_observation(const BeliefGrid& b, const AgeGrid& age,
                                         Coord xl, Coord xf);
ObservationStack build_sensor_observation(const BeliefGrid& b, const AgeGrid& age,
                                          Coord xl, Coord xf, const std::vector<Cell>& view);

enum class ChannelMode { centralized, distributed, oc_bypass };

// One slot of an episode as logged.
struct SlotRecord {
    int k = 0;
    Coord pos;        // robot position after the move
    int action = 0;
    double reward = 0.0;
    bool comm_slot = false;
    std::vector<uint8_t> sensor_actions;  // per sensor; single entry = chosen area
    bool collision = false;
    int delivered_area = -1;  // -1 nothing, -2 full map
    uint64_t belief_hash = 0;
};

enum class TerminalCause { goal, timeout };

struct EpisodeLog {
    uint64_t episode_seed = 0;
    Task task = Task::open_water;
    ChannelMode mode = ChannelMode::centralized;
    int n = 0;
    int steps_cap = 0;  // K
    Coord start, goal;
    std::vector<SlotRecord> slots;
    TerminalCause cause = TerminalCause::timeout;
    int n_step = 0;

    // Line-delimited record format, version 1. Header line:
    //   auvsim-episode v1 <task> <mode> <n> <K> <seed> <start_c> <start_r>
    //   <goal_c> <goal_r> <cause> <n_step>
    // then one slot per line:
    //   <k> <c> <r> <action> <reward> <comm> <sensor_actions|-> <collision>
    //   <delivered> <belief_hash hex>
    std::string serialize() const;
    static EpisodeLog parse(const std::string& text);  // throws IoError on malformed input
};

struct Transition {
    ObservationStack obs;
    int action = 0;
    double reward = 0.0;
    ObservationStack next;  // unused when done
    bool done = false;
};

// The concrete CP-POMDP instance: one robot moving in every slot, sensors
// restricted to the null action outside communication slots, and the channel
// model resolving their joint action.
struct CpPomdpSpec {
    Task task = Task::debris;
    ChannelMode mode = ChannelMode::centralized;
    int comm_period = 5;
    int num_sensors = 1;       // |G|: 1 centralized, C distributed
    int robot_actions = kNumMoves;
    int sensor_actions = 9;    // C centralized, 2 distributed, 0 for the bypass
    SensorLayout layout;
    bool oc_every_slot = false;  // literal "every slot" refresh variant

    bool is_comm(int k) const { return is_comm_slot(k, comm_period); }
    static CpPomdpSpec make(Task task, ChannelMode mode, const TaskConfig& cfg, int num_areas);
};

using RobotPolicy = std::function<int(const ObservationStack&)>;

// Passed to sensor policies at each comm slot. Observations are built lazily:
// the fixed benchmark strategies never touch them.
struct SensorContext {
    int k = 0;
    Coord robot_pos;
    const SensorLayout* layout = nullptr;
    std::function<const ObservationStack&(int g)> observation;
};

struct SensorPolicy {
    // centralized: returns the chosen area
    std::function<int(const SensorContext&)> centralized;
    // distributed: fills one {0,1} action per sensor
    std::function<void(const SensorContext&, std::vector<uint8_t>&)> distributed;
};

struct EpisodeHooks {
    std::function<void(const Transition&)> on_robot_transition;
    std::function<void(int g, const Transition&)> on_sensor_transition;
    std::function<void(const EnvState&, const SlotRecord&)> on_slot;
    bool want_sensor_transitions = false;  // sensor observations are built only when set
};

// Runs one episode: per slot, ages tick, dynamics advance and sensors transmit
// on comm slots, the robot senses locally, then acts. Robot transitions pair
// consecutive decision observations; sensor transitions pair consecutive comm
// observations and carry the K_p+1-slot window reward, marked terminal when the
// episode ends inside the window.
EpisodeLog run_episode(const CpPomdpSpec& spec, const TaskConfig& cfg, const RobotPolicy& robot,
                       const SensorPolicy& sensors, RngStream& rng,
                       const EpisodeHooks* hooks = nullptr);

}  // namespace auvsim
