#pragma once

#include <string>

#include "auvsim/learner.hpp"
#include "auvsim/policies.hpp"

namespace auvsim {

struct TrainingSchedule {
    int n_round = 2;
    int64_t n_train_robot = 100000;   // N_train^l, per robot phase
    int64_t n_train_sensor = 500000;  // N_train^g, per sensor phase
    int64_t n_test = 10000;
    Strategy initial_sensor = Strategy::cc;  // sensor side during the round-1 robot phase
    bool reset_per_phase = true;  // trainee net, optimizer and buffer reset at each phase start
    void validate() const;
};

// Full run configuration. The config file is a plain `key = value` document
// ('#' starts a comment); keys follow the simulation-settings names:
//   map_size, num_buoys, num_areas, steps_per_episode, K_p, rho, sigma, eta,
//   lambda, zeta, n_round, n_train_robot, n_train_sensor, n_test, v_robot
// plus: task, strategy, seed, sigma_ramp, oc_every_slot, batch_size,
// train_freq, sensor_train_freq, target_sync, buffer_capacity,
// sensor_buffer_capacity, min_buffer, eps_start, eps_end, initial_sensor,
// reset_per_phase, metrics_window, log_episodes.
struct AppConfig {
    Task task = Task::debris;
    Strategy strategy = Strategy::cc;
    TaskConfig env;
    int num_buoys = 9;
    int num_areas = 9;
    LearnerConfig learner;
    int sensor_train_freq = 8;
    size_t sensor_buffer_capacity = 20000;
    TrainingSchedule schedule;
    uint64_t seed = 1;
    bool oc_every_slot = false;
    int metrics_window = 200;
    int log_episodes = 100;  // test-episode logs retained by export

    void validate() const;
    void set(const std::string& key, const std::string& value);  // throws ConfigError
    std::string serialize() const;  // canonical form; parses back to an equal config

    static AppConfig from_file(const std::string& path);
    static AppConfig from_text(const std::string& text);
};

}  // namespace auvsim
