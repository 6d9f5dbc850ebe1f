#include "auvsim/grid.hpp"

#include <algorithm>

namespace auvsim {

Task task_from_name(std::string_view name) {
    if (name == "debris") return Task::debris;
    if (name == "muling") return Task::muling;
    if (name == "open_water" || name == "open") return Task::open_water;
    throw ConfigError("unknown task tag: " + std::string(name));
}

std::string_view task_name(Task t) {
    switch (t) {
        case Task::debris: return "debris";
        case Task::muling: return "muling";
        case Task::open_water: return "open_water";
    }
    return "?";
}

void TaskConfig::validate() const {
    if (map_size < 4) throw ConfigError("map_size must be >= 4");
    if (!(rho > sigma && sigma > 0.0)) throw ConfigError("rewards must satisfy rho > sigma > 0");
    if (eta < 0.0) throw ConfigError("eta must be >= 0");
    if (v_robot < 1) throw ConfigError("v_robot must be >= 1");
    if (steps_per_episode < 1) throw ConfigError("steps_per_episode must be >= 1");
    if (comm_period < 1) throw ConfigError("K_p must be >= 1");
}

std::array<std::array<int, 2>, 3> wall_rows(int n) {
    return {{{2, 3}, {n / 2, n / 2 + 1}, {n - 2, n - 1}}};
}

void materialize_walls(GridMap& map, const WallState& w) {
    std::fill(map.cells.begin(), map.cells.end(), Cell::free);
    for (int j = 0; j < 3; ++j) {
        for (int r : w.rows[j]) {
            for (int c = 1; c <= map.n; ++c) {
                if (c != w.opening[j]) map.at({c, r}) = Cell::obstacle;
            }
        }
    }
}

void materialize_targets(GridMap& map, const TargetSet& t) {
    std::fill(map.cells.begin(), map.cells.end(), Cell::free);
    for (const auto& tg : t.targets) {
        if (!tg.visited) map.at(tg.pos) = Cell::target;
    }
}

EnvState new_episode(Task task, const TaskConfig& cfg, RngStream& rng) {
    cfg.validate();
    const int n = cfg.map_size;
    EnvState env;
    env.task = task;
    env.map = GridMap(n);
    env.robot.pos = {rng.uniform_int(1, n), 1};
    env.robot.goal = {rng.uniform_int(1, n), n};

    switch (task) {
        case Task::debris: {
            env.walls.rows = wall_rows(n);
            for (int j = 0; j < 3; ++j) env.walls.opening[j] = rng.uniform_int(1, n);
            materialize_walls(env.map, env.walls);
            break;
        }
        case Task::muling: {
            for (int i = 0; i < 2; ++i) {
                Coord t;
                do {
                    t = {rng.uniform_int(1, n), rng.uniform_int(1, n)};
                } while (t == env.robot.pos);
                env.targets.targets.push_back({t, false});
            }
            materialize_targets(env.map, env.targets);
            break;
        }
        case Task::open_water:
            break;
    }
    return env;
}

Coord step_robot(EnvState& env, int action) {
    Coord dst = move_target(env.robot.pos, action);
    if (env.map.in_bounds(dst) && env.map.at(dst) != Cell::obstacle) {
        env.robot.pos = dst;
        if (env.map.at(dst) == Cell::target) {
            for (auto& t : env.targets.targets) {
                if (!t.visited && t.pos == dst) t.visited = true;
            }
            env.map.at(dst) = Cell::free;
        }
    }
    return env.robot.pos;
}

std::vector<double> shift_kernel_pmf(int n, int prev) {
    std::vector<double> w(static_cast<size_t>(n));
    double total = 0.0;
    for (int z = 1; z <= n; ++z) {
        double d = n - std::abs(z - prev);
        w[z - 1] = d * d;
        total += d * d;
    }
    for (double& x : w) x /= total;
    return w;
}

void advance_walls(EnvState& env, RngStream& rng) {
    const int n = env.map.n;
    for (int j = 0; j < 3; ++j) {
        std::vector<double> w(static_cast<size_t>(n));
        for (int z = 1; z <= n; ++z) {
            double d = n - std::abs(z - env.walls.opening[j]);
            w[z - 1] = d * d;
        }
        env.walls.opening[j] = 1 + rng.discrete(w);
    }
    materialize_walls(env.map, env.walls);
}

void advance_targets(EnvState& env, RngStream& rng) {
    const int n = env.map.n;
    for (auto& t : env.targets.targets) {
        if (t.visited) continue;
        Coord next;
        for (int axis = 0; axis < 2; ++axis) {
            int prev = axis == 0 ? t.pos.c : t.pos.r;
            std::vector<double> w(static_cast<size_t>(n));
            for (int z = 1; z <= n; ++z) {
                double d = n - std::abs(z - prev);
                w[z - 1] = d * d;
            }
            (axis == 0 ? next.c : next.r) = 1 + rng.discrete(w);
        }
        t.pos = next;
        // the robot collects a node that drifts onto its cell
        if (t.pos == env.robot.pos) t.visited = true;
    }
    materialize_targets(env.map, env.targets);
}

void advance_dynamics(EnvState& env, RngStream& rng) {
    switch (env.task) {
        case Task::debris: advance_walls(env, rng); break;
        case Task::muling: advance_targets(env, rng); break;
        case Task::open_water: break;
    }
}

int chi_debris(const EnvState& env, int action) {
    const Coord x = env.robot.pos;
    const Coord dst = move_target(x, action);
    // 1: moving up into a free cell
    if (action == 2 && env.map.in_bounds(dst) && env.map.at(dst) == Cell::free) return 1;
    // 2: directly below a debris line, moving toward its passage
    for (int j = 0; j < 3; ++j) {
        const auto& rows = env.walls.rows[j];
        if (x.r + 1 == rows[0] || x.r + 1 == rows[1]) {
            int z = env.walls.opening[j];
            if (std::abs(dst.c - z) < std::abs(x.c - z)) return 1;
        }
    }
    // 3: on the top row, closing in on the vessel
    if (x.r == env.map.n && dist2(dst, env.robot.goal) < dist2(x, env.robot.goal)) return 1;
    return 0;
}

int chi_muling(const EnvState& env, int action) {
    const Coord x = env.robot.pos;
    const Coord dst = move_target(x, action);
    const Coord xf = env.robot.goal;

    std::vector<Coord> active;
    for (const auto& t : env.targets.targets) {
        if (!t.visited) active.push_back(t.pos);
    }

    if (active.size() == 2) {
        // head for the node that makes the full tour (both nodes, then the
        // vessel) shortest; ties go to the first node
        double tour0 = dist2(x, active[0]) + dist2(active[0], active[1]) + dist2(active[1], xf);
        double tour1 = dist2(x, active[1]) + dist2(active[1], active[0]) + dist2(active[0], xf);
        Coord t = tour0 <= tour1 ? active[0] : active[1];
        return dist2(dst, t) < dist2(x, t) ? 1 : 0;
    }
    if (active.size() == 1) {
        return dist2(dst, active[0]) < dist2(x, active[0]) ? 1 : 0;
    }
    return dist2(dst, xf) < dist2(x, xf) ? 1 : 0;
}

int chi_open(const EnvState& env, int action) {
    const Coord x = env.robot.pos;
    return dist2(move_target(x, action), env.robot.goal) < dist2(x, env.robot.goal) ? 1 : 0;
}

int chi(const EnvState& env, int action) {
    switch (env.task) {
        case Task::debris: return chi_debris(env, action);
        case Task::muling: return chi_muling(env, action);
        case Task::open_water: return chi_open(env, action);
    }
    return 0;
}

StepOutcome apply_robot_action(EnvState& env, int action, const TaskConfig& cfg, int k) {
    const int progressed = chi(env, action);
    step_robot(env, action);

    StepOutcome out;
    if (env.robot.pos == env.robot.goal && env.targets.active_count() == 0) {
        out.reward = cfg.rho;
        out.reached_goal = true;
    } else if (progressed) {
        out.reward = sigma_at(cfg, k);
    }
    return out;
}

}  // namespace auvsim
