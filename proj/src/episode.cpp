#include "auvsim/episode.hpp"

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <sstream>

namespace auvsim {

void ObservationStack::write_floats(float* dst) const {
    const size_t plane = static_cast<size_t>(n) * n;
    const float inv_age = 1.0f / static_cast<float>(age_denom);
    for (size_t i = 0; i < plane; ++i) dst[i] = static_cast<float>(belief[i]) / 3.0f;
    for (size_t i = 0; i < plane; ++i) dst[plane + i] = static_cast<float>(age[i]) * inv_age;
    float* pos = dst + 2 * plane;
    float* goal = dst + 3 * plane;
    std::fill(pos, pos + plane, 0.0f);
    std::fill(goal, goal + plane, 0.0f);
    pos[static_cast<size_t>(xl_r - 1) * n + (xl_c - 1)] = 1.0f;
    goal[static_cast<size_t>(xf_r - 1) * n + (xf_c - 1)] = 1.0f;
    if (channels == 5) {
        float* v = dst + 4 * plane;
        for (size_t i = 0; i < plane; ++i) v[i] = static_cast<float>(view[i]) / 3.0f;
    }
}

std::vector<float> ObservationStack::to_floats() const {
    std::vector<float> out(input_size());
    write_floats(out.data());
    return out;
}

bool is_comm_slot(int k, int comm_period) {
    if (comm_period <= 0) throw ConfigError("K_p must be positive");
    return k % comm_period == 0;
}

ObservationStack build_robot_observation(const BeliefGrid& b, const AgeGrid& age,
                                         Coord xl, Coord xf) {
    ObservationStack o;
    o.n = b.n;
    o.channels = 4;
    o.age_denom = age.sentinel;
    o.belief.resize(b.cells.size());
    for (size_t i = 0; i < b.cells.size(); ++i) o.belief[i] = static_cast<uint8_t>(b.cells[i]);
    o.age = age.age;
    o.xl_c = static_cast<uint8_t>(xl.c);
    o.xl_r = static_cast<uint8_t>(xl.r);
    o.xf_c = static_cast<uint8_t>(xf.c);
    o.xf_r = static_cast<uint8_t>(xf.r);
    return o;
}

ObservationStack build_sensor_observation(const BeliefGrid& b, const AgeGrid& age,
                                          Coord xl, Coord xf, const std::vector<Cell>& view) {
    ObservationStack o = build_robot_observation(b, age, xl, xf);
    o.channels = 5;
    o.view.resize(view.size());
    for (size_t i = 0; i < view.size(); ++i) o.view[i] = static_cast<uint8_t>(view[i]);
    return o;
}

CpPomdpSpec CpPomdpSpec::make(Task task, ChannelMode mode, const TaskConfig& cfg, int num_areas) {
    CpPomdpSpec spec;
    spec.task = task;
    spec.mode = mode;
    spec.comm_period = cfg.comm_period;
    spec.layout = partition_map(cfg.map_size, num_areas);
    switch (mode) {
        case ChannelMode::centralized:
            spec.num_sensors = 1;
            spec.sensor_actions = num_areas;
            break;
        case ChannelMode::distributed:
            spec.num_sensors = num_areas;  // one buoy per block
            spec.sensor_actions = 2;
            break;
        case ChannelMode::oc_bypass:
            spec.num_sensors = 1;
            spec.sensor_actions = 0;
            break;
    }
    return spec;
}

namespace {

// Sensor transitions in flight: the window [k0, k0+K_p] closes at the next comm
// slot once that slot's robot reward is known.
struct SensorWindow {
    int k0 = 0;
    std::vector<ObservationStack> obs;  // per sensor at k0
    std::vector<uint8_t> actions;
    std::vector<double> rewards;
    std::vector<ObservationStack> next_obs;  // per sensor at k0+K_p
    bool has_next = false;
};

uint64_t hash_belief(const BeliefGrid& b) {
    return fnv1a64(b.cells.data(), b.cells.size());
}

}  // namespace

EpisodeLog run_episode(const CpPomdpSpec& spec, const TaskConfig& cfg, const RobotPolicy& robot,
                       const SensorPolicy& sensors, RngStream& rng, const EpisodeHooks* hooks) {
    cfg.validate();
    const int window_len = cfg.comm_period + 1;
    EnvState env = new_episode(spec.task, cfg, rng);
    const int n = cfg.map_size;
    BeliefGrid belief(n);
    AgeGrid age(n, static_cast<uint16_t>(cfg.steps_per_episode + 1));

    EpisodeLog log;
    log.task = spec.task;
    log.mode = spec.mode;
    log.n = n;
    log.steps_cap = cfg.steps_per_episode;
    log.start = env.robot.pos;
    log.goal = env.robot.goal;

    const bool track_windows =
        hooks && hooks->want_sensor_transitions && spec.mode != ChannelMode::oc_bypass;
    std::vector<SensorWindow> windows;
    std::optional<Transition> pending_robot;

    auto emit_windows = [&](bool episode_over) {
        for (auto it = windows.begin(); it != windows.end();) {
            SensorWindow& w = *it;
            bool complete = static_cast<int>(w.rewards.size()) == window_len;
            if (!complete && !episode_over) {
                ++it;
                continue;
            }
            std::vector<double> padded = w.rewards;
            padded.resize(static_cast<size_t>(window_len), 0.0);
            std::vector<double> r_g = sensor_reward(w.actions, padded, cfg.eta, cfg.comm_period);
            // terminal when the episode ended anywhere in [k0, k0+K_p]
            bool done = episode_over;
            for (size_t g = 0; g < w.actions.size(); ++g) {
                Transition t;
                t.obs = w.obs[g];
                t.action = w.actions[g];
                t.reward = r_g[g];
                t.done = done;
                t.next = w.has_next ? w.next_obs[g] : w.obs[g];
                hooks->on_sensor_transition(static_cast<int>(g), t);
            }
            it = windows.erase(it);
        }
    };

    for (int k = 0; k < cfg.steps_per_episode; ++k) {
        age_tick(age);
        const bool comm = spec.is_comm(k);

        SlotRecord rec;
        rec.k = k;
        rec.comm_slot = comm;

        if (comm) {
            // the episode-start draw is the slot-0 state; dynamics move afterwards
            if (k > 0) advance_dynamics(env, rng);
            sense_local(belief, age, env.map, env.robot.pos, cfg.v_robot);

            // per-sensor observations, built on demand
            std::vector<ObservationStack> sensor_obs(static_cast<size_t>(spec.num_sensors));
            std::vector<bool> built(static_cast<size_t>(spec.num_sensors), false);
            auto obs_of = [&](int g) -> const ObservationStack& {
                if (!built[g]) {
                    auto view = sensor_view(env.map, spec.layout, g,
                                            spec.mode == ChannelMode::centralized);
                    sensor_obs[g] = build_sensor_observation(belief, age, env.robot.pos,
                                                             env.robot.goal, view);
                    built[g] = true;
                }
                return sensor_obs[g];
            };
            SensorContext ctx{k, env.robot.pos, &spec.layout, obs_of};

            if (track_windows && !windows.empty()) {
                for (auto& w : windows) {
                    w.next_obs.clear();
                    for (int g = 0; g < spec.num_sensors; ++g) w.next_obs.push_back(obs_of(g));
                    w.has_next = true;
                }
            }

            switch (spec.mode) {
                case ChannelMode::centralized: {
                    int area = sensors.centralized(ctx);
                    apply_centralized_tx(belief, age, env.map, spec.layout, area);
                    rec.sensor_actions = {static_cast<uint8_t>(area)};
                    rec.delivered_area = area;
                    break;
                }
                case ChannelMode::distributed: {
                    std::vector<uint8_t> actions(static_cast<size_t>(spec.num_sensors), 0);
                    sensors.distributed(ctx, actions);
                    CommOutcome out =
                        apply_distributed_tx(belief, age, env.map, spec.layout, actions);
                    rec.sensor_actions = actions;
                    rec.collision = out.collision;
                    rec.delivered_area = out.delivered_area;
                    break;
                }
                case ChannelMode::oc_bypass: {
                    apply_full_map_tx(belief, age, env.map);
                    rec.delivered_area = -2;
                    break;
                }
            }

            if (track_windows) {
                SensorWindow w;
                w.k0 = k;
                w.actions = rec.sensor_actions;
                for (int g = 0; g < spec.num_sensors; ++g) w.obs.push_back(obs_of(g));
                windows.push_back(std::move(w));
            }
        } else {
            sense_local(belief, age, env.map, env.robot.pos, cfg.v_robot);
            if (spec.mode == ChannelMode::oc_bypass && spec.oc_every_slot)
                apply_full_map_tx(belief, age, env.map);
        }

        ObservationStack obs = build_robot_observation(belief, age, env.robot.pos, env.robot.goal);
        if (pending_robot && hooks && hooks->on_robot_transition) {
            pending_robot->next = obs;
            hooks->on_robot_transition(*pending_robot);
            pending_robot.reset();
        }

        int action = robot(obs);
        if (action < 0 || action >= spec.robot_actions)
            throw std::logic_error("robot policy returned an out-of-space action");
        StepOutcome out = apply_robot_action(env, action, cfg, k);
        const bool done = out.reached_goal || k == cfg.steps_per_episode - 1;

        rec.pos = env.robot.pos;
        rec.action = action;
        rec.reward = out.reward;
        rec.belief_hash = hash_belief(belief);
        log.slots.push_back(rec);

        if (hooks && hooks->on_robot_transition) {
            if (done) {
                Transition t{obs, action, out.reward, obs, true};
                hooks->on_robot_transition(t);
            } else {
                pending_robot = Transition{obs, action, out.reward, {}, false};
            }
        }

        if (track_windows) {
            for (auto& w : windows) w.rewards.push_back(out.reward);
            emit_windows(done);
        }

        if (hooks && hooks->on_slot) hooks->on_slot(env, rec);

        if (out.reached_goal) {
            log.cause = TerminalCause::goal;
            log.n_step = k + 1;
            return log;
        }
    }
    log.cause = TerminalCause::timeout;
    log.n_step = cfg.steps_per_episode;
    return log;
}

std::string EpisodeLog::serialize() const {
    std::string text;
    char buf[256];
    const char* mode_name = mode == ChannelMode::centralized   ? "centralized"
                            : mode == ChannelMode::distributed ? "distributed"
                                                               : "oc";
    std::snprintf(buf, sizeof buf, "auvsim-episode v1 %s %s %d %d %" PRIu64 " %d %d %d %d %s %d\n",
                  std::string(task_name(task)).c_str(), mode_name, n, steps_cap, episode_seed,
                  start.c, start.r, goal.c, goal.r,
                  cause == TerminalCause::goal ? "goal" : "timeout", n_step);
    text += buf;
    for (const auto& s : slots) {
        std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g %d ", s.k, s.pos.c, s.pos.r, s.action,
                      s.reward, s.comm_slot ? 1 : 0);
        text += buf;
        if (s.sensor_actions.empty()) {
            text += '-';
        } else {
            for (size_t i = 0; i < s.sensor_actions.size(); ++i) {
                if (i) text += ',';
                text += std::to_string(static_cast<int>(s.sensor_actions[i]));
            }
        }
        std::snprintf(buf, sizeof buf, " %d %d %016" PRIx64 "\n", s.collision ? 1 : 0,
                      s.delivered_area, s.belief_hash);
        text += buf;
    }
    return text;
}

EpisodeLog EpisodeLog::parse(const std::string& text) {
    std::istringstream in(text);
    std::string magic, version, task_tag, mode_tag, cause_tag;
    EpisodeLog log;
    in >> magic >> version;
    if (magic != "auvsim-episode" || version != "v1")
        throw IoError("not a v1 episode log");
    in >> task_tag >> mode_tag >> log.n >> log.steps_cap >> log.episode_seed >> log.start.c >>
        log.start.r >> log.goal.c >> log.goal.r >> cause_tag >> log.n_step;
    if (!in) throw IoError("malformed episode log header");
    log.task = task_from_name(task_tag);
    log.mode = mode_tag == "centralized"   ? ChannelMode::centralized
               : mode_tag == "distributed" ? ChannelMode::distributed
                                           : ChannelMode::oc_bypass;
    log.cause = cause_tag == "goal" ? TerminalCause::goal : TerminalCause::timeout;

    SlotRecord s;
    std::string actions_tok, hash_tok;
    int comm = 0, collision = 0;
    while (in >> s.k >> s.pos.c >> s.pos.r >> s.action >> s.reward >> comm >> actions_tok >>
           collision >> s.delivered_area >> hash_tok) {
        s.comm_slot = comm != 0;
        s.collision = collision != 0;
        s.sensor_actions.clear();
        if (actions_tok != "-") {
            size_t pos = 0;
            while (pos <= actions_tok.size()) {
                size_t comma = actions_tok.find(',', pos);
                if (comma == std::string::npos) comma = actions_tok.size();
                s.sensor_actions.push_back(
                    static_cast<uint8_t>(std::stoi(actions_tok.substr(pos, comma - pos))));
                pos = comma + 1;
            }
        }
        s.belief_hash = std::strtoull(hash_tok.c_str(), nullptr, 16);
        log.slots.push_back(s);
    }
    if (static_cast<int>(log.slots.size()) != log.n_step)
        throw IoError("episode log slot count does not match n_step");
    return log;
}

}  // namespace auvsim
