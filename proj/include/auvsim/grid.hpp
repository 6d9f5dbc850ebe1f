#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "auvsim/errors.hpp"
#include "auvsim/rng.hpp"

namespace auvsim {

// Underwater mission variants. `open_water` is a degenerate free map with no
// obstacles or data nodes (the robot only has to reach the vessel); it is used
// for learner calibration runs and tests.
enum class Task { debris, muling, open_water };

Task task_from_name(std::string_view name);  // throws ConfigError on unknown tag
std::string_view task_name(Task t);

// Cell content codes. `unknown` never appears in a GridMap, only in belief grids.
enum class Cell : uint8_t { unknown = 0, free = 1, obstacle = 2, target = 3 };

// Map coordinate, 1-based: c = column (first coordinate), r = row (second).
// Row 1 is the bottom of the map (the robot's start side), row N the top (the
// surface vessel's side).
struct Coord {
    int c = 1;
    int r = 1;
    bool operator==(const Coord&) const = default;
};

inline double dist2(Coord a, Coord b) {
    double dc = a.c - b.c, dr = a.r - b.r;
    return std::sqrt(dc * dc + dr * dr);
}

struct GridMap {
    int n = 0;
    std::vector<Cell> cells;  // row-major, index = (r-1)*n + (c-1)

    explicit GridMap(int side = 0) : n(side), cells(static_cast<size_t>(side) * side, Cell::free) {}
    bool in_bounds(Coord x) const { return x.c >= 1 && x.c <= n && x.r >= 1 && x.r <= n; }
    Cell at(Coord x) const { return cells[static_cast<size_t>(x.r - 1) * n + (x.c - 1)]; }
    Cell& at(Coord x) { return cells[static_cast<size_t>(x.r - 1) * n + (x.c - 1)]; }
};

// Three horizontal debris lines, two rows each, one free passage per line.
struct WallState {
    std::array<int, 3> opening{};                   // z_j, column of the free passage
    std::array<std::array<int, 2>, 3> rows{};       // Y_j, the two rows of line j
};

// Fixed row pairs for the three debris lines: {2,3}, {N/2, N/2+1}, {N-2, N-1}.
std::array<std::array<int, 2>, 3> wall_rows(int n);

struct TargetInfo {
    Coord pos;
    bool visited = false;
};

struct TargetSet {
    std::vector<TargetInfo> targets;
    int active_count() const {
        int k = 0;
        for (const auto& t : targets) k += t.visited ? 0 : 1;
        return k;
    }
};

struct RobotState {
    Coord pos;   // x_l, starts on row 1
    Coord goal;  // x_f, fixed per episode on row N
};

struct TaskConfig {
    int map_size = 12;          // N
    double rho = 1.0;           // final reward
    double sigma = 0.22;        // intermediate reward
    double eta = 1.0;           // collision penalty
    int v_robot = 2;            // robot sensing radius, cells
    int steps_per_episode = 100;  // K
    int comm_period = 5;          // K_p
    bool sigma_ramp = false;      // if set, sigma(k) = sigma * (1 + k/K)
    void validate() const;        // throws ConfigError
};

// Intermediate reward at slot k under the optional ramp schedule.
inline double sigma_at(const TaskConfig& cfg, int k) {
    if (!cfg.sigma_ramp) return cfg.sigma;
    return cfg.sigma * (1.0 + static_cast<double>(k) / cfg.steps_per_episode);
}

// Movement action indices; the displacement vectors are (dc, dr).
inline constexpr int kNumMoves = 4;
inline constexpr std::array<std::pair<int, int>, kNumMoves> kMoveDelta = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

inline Coord move_target(Coord x, int action) {
    return {x.c + kMoveDelta[action].first, x.r + kMoveDelta[action].second};
}

struct EnvState {
    Task task = Task::open_water;
    GridMap map;
    WallState walls;    // debris only
    TargetSet targets;  // muling only
    RobotState robot;
};

void materialize_walls(GridMap& map, const WallState& w);
void materialize_targets(GridMap& map, const TargetSet& t);

// Draws a fresh episode: robot uniform on the bottom row, vessel uniform on the
// top row; debris openings i.i.d. uniform over columns; muling targets i.i.d.
// uniform over the map, distinct from the robot start.
EnvState new_episode(Task task, const TaskConfig& cfg, RngStream& rng);

// x' = x + a unless the destination is off-map or an obstacle (the move is a
// no-op then). Landing on a target marks it visited and removes it from the map.
// Returns the resulting position.
Coord step_robot(EnvState& env, int action);

// Random-walk kernel for one coordinate: P(z) proportional to (N - |z - prev|)^2
// over z in {1..N}. Shared by the wall openings and (per coordinate) the targets.
std::vector<double> shift_kernel_pmf(int n, int prev);

// Resample each wall opening from the kernel and rebuild the obstacle rows.
void advance_walls(EnvState& env, RngStream& rng);

// Move each active target independently (kernel applied per coordinate). A
// target landing on the robot's cell is collected immediately.
void advance_targets(EnvState& env, RngStream& rng);

void advance_dynamics(EnvState& env, RngStream& rng);

// Intermediate-reward indicators. Evaluated on the pre-move state and the
// attempted displacement (blocking is not considered).
int chi_debris(const EnvState& env, int action);
int chi_muling(const EnvState& env, int action);
int chi_open(const EnvState& env, int action);
int chi(const EnvState& env, int action);

struct StepOutcome {
    double reward = 0.0;
    bool reached_goal = false;  // terminal: at the vessel with every target visited
};

// chi on the pre-move state, then the move, then the slot reward:
// rho when the mission completes, sigma(k) when chi fired, 0 otherwise.
StepOutcome apply_robot_action(EnvState& env, int action, const TaskConfig& cfg, int k);

}  // namespace auvsim
