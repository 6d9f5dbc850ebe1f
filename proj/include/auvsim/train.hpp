#pragma once

#include <optional>

#include "auvsim/config.hpp"
#include "auvsim/metrics.hpp"

namespace auvsim {

struct PhaseSpan {
    std::string name;       // "robot-1", "sensor-1", ...
    int64_t first_episode;  // index into RunMetrics::train_nstep
    int64_t count;
};

struct TrainResult {
    Strategy strategy = Strategy::cc;
    ValueNet robot_net;
    std::vector<ValueNet> sensor_nets;  // empty for the NC baselines
    RunMetrics metrics;
    std::vector<PhaseSpan> phases;
    std::vector<EpisodeLog> test_logs;  // first log_episodes test episodes
};

// Fixed-sensor (networked control) training: the robot's DQN learns against
// RC, CC or OC for n_train_robot episodes, then a greedy test run.
TrainResult train_nc(Strategy strategy, const AppConfig& cfg);

// Iterative joint training: n_round rounds of (robot phase, sensor phase),
// then one final robot phase. The trainee's network, optimizer, replay buffer
// and epsilon schedule restart at each of its phases (reset_per_phase).
TrainResult train_jcc(Strategy strategy, const AppConfig& cfg);

TrainResult train(const AppConfig& cfg);  // dispatch on cfg.strategy

// Greedy evaluation over n_test episodes with per-episode seeds derived from
// cfg.seed; fills the N_step distribution and both heatmaps.
RunMetrics evaluate(const AppConfig& cfg, const ValueNet* robot_net,
                    std::span<const ValueNet> sensor_nets, int64_t n_test,
                    std::vector<EpisodeLog>* logs_out = nullptr, int max_logs = 0);

// Sensor side for a strategy: fixed benchmark, trained nets, or the oc bypass.
SensorPolicy sensor_policy_for(Strategy s, RngStream* rc_rng, std::span<const ValueNet> nets);

// Run directory layout: config.snapshot, seeds.manifest, metrics.txt,
// train_curve.tsv, test_nstep.txt, sensor_collisions.txt, heatmap .txt/.ppm
// pairs, robot.ckpt, sensor_<g>.ckpt, episodes.log. Every file except the
// manifest (which carries the wall-clock stamp) is byte-deterministic.
void export_run(const std::string& out_dir, const AppConfig& cfg, const TrainResult& result);

void write_heatmap_ppm(const std::string& path, const std::vector<double>& values, int rows,
                       int cols, int cell_px = 24);

// Re-renders the .ppm images from the heatmap matrices in a run directory.
void render_run_plots(const std::string& out_dir);

struct ReplayResult {
    EpisodeLog replayed;
    bool matched_stored = false;  // compared against episodes.log when present
    bool had_stored = false;
};

// Re-simulates test episode `index` of an exported run from its seed manifest
// and checkpoints.
ReplayResult replay_episode(const std::string& out_dir, int64_t index);

std::vector<EpisodeLog> parse_episode_logs(const std::string& text);

}  // namespace auvsim
