#pragma once

#include <cstdint>
#include <vector>

#include "auvsim/episode.hpp"

namespace auvsim {

// Nearest-rank percentiles: the p-th percentile of n sorted samples is the
// value at index ceil(p/100 * n), 1-based. Failed episodes enter at N_step = K.
struct NstepSummary {
    double mean = 0.0;
    int p5 = 0, p25 = 0, p50 = 0, p75 = 0, p95 = 0;
};

NstepSummary nstep_stats(const std::vector<int>& nsteps);  // throws on an empty list

struct TrainCurvePoint {
    int64_t episode = 0;  // last episode of the window
    double mean = 0.0;
    int p25 = 0, p75 = 0;
};

struct RunMetrics {
    int n = 12;
    int num_areas = 9;

    std::vector<int> train_nstep;  // per training episode, in order
    std::vector<int> test_nstep;
    NstepSummary test_summary;

    // robot position at each decision slot of the test episodes, normalized to sum 1
    std::vector<double> location_heat;
    // delivered-area probability per comm slot: a full-map delivery spreads 1/C
    // over every area, a collision or silent slot contributes nothing, so the
    // total is the delivery rate (at most 1)
    std::vector<double> tx_heat;

    int64_t comm_slots = 0;
    int64_t collisions = 0;
    int64_t deliveries = 0;
    int64_t slots_simulated = 0;

    // collision count per sensor-phase training episode (JCC runs only)
    std::vector<int> sensor_phase_collisions;

    double collision_rate() const {
        return comm_slots ? static_cast<double>(collisions) / static_cast<double>(comm_slots) : 0.0;
    }
    std::vector<TrainCurvePoint> train_curve(int window = 200) const;
};

// Accumulates test-run statistics from finished episode logs. The location
// heatmap counts the robot's decision-time position at every slot, so each
// episode puts at least one count on the bottom row.
class MetricsAccumulator {
public:
    MetricsAccumulator(int n, int num_areas);
    void consume(const EpisodeLog& log);
    RunMetrics finish() const;

private:
    int n_, num_areas_;
    std::vector<int64_t> location_counts_;
    std::vector<double> tx_mass_;
    int64_t positions_ = 0, comm_slots_ = 0, collisions_ = 0, deliveries_ = 0, slots_ = 0;
    std::vector<int> nsteps_;
};

}  // namespace auvsim
