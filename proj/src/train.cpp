#include "auvsim/train.hpp"

namespace auvsim {

namespace {

// Stream indices: one code space per (phase, episode) pair.
uint64_t ep_code(int phase, int64_t episode) {
    return (static_cast<uint64_t>(phase) << 40) | static_cast<uint64_t>(episode);
}

NetSpec robot_net_spec(const AppConfig& cfg) {
    return NetSpec{4, cfg.env.map_size, kNumMoves, 64};
}

NetSpec sensor_net_spec(const AppConfig& cfg, ChannelMode mode) {
    int actions = mode == ChannelMode::distributed ? 2 : cfg.num_areas;
    return NetSpec{5, cfg.env.map_size, actions, 64};
}

LearnerConfig sensor_learner_cfg(const AppConfig& cfg) {
    LearnerConfig lc = cfg.learner;
    lc.train_freq = cfg.sensor_train_freq;
    lc.buffer_capacity = cfg.sensor_buffer_capacity;
    lc.min_buffer = std::min<int>(lc.min_buffer, static_cast<int>(lc.buffer_capacity) / 2);
    return lc;
}

// Round-1 sensor behavior on the distributed channel: the deterministic
// analogues of the centralized benchmarks (exactly one transmitter, chosen by
// a rule every buoy can evaluate from the robot's position).
SensorPolicy fixed_distributed_policy(Strategy s, RngStream* rng) {
    SensorPolicy p;
    switch (s) {
        case Strategy::cc:
            p.distributed = [](const SensorContext& ctx, std::vector<uint8_t>& actions) {
                actions[static_cast<size_t>(cc_policy(ctx.robot_pos, *ctx.layout))] = 1;
            };
            break;
        case Strategy::rc:
            p.distributed = [rng](const SensorContext& ctx, std::vector<uint8_t>& actions) {
                actions[static_cast<size_t>(rc_policy(*rng, ctx.layout->num_areas))] = 1;
            };
            break;
        default:
            throw ConfigError("initial sensor strategy must be rc or cc on the distributed channel");
    }
    return p;
}

struct PhaseStats {
    int64_t episodes = 0;
    int64_t slots = 0;
};

}  // namespace

SensorPolicy sensor_policy_for(Strategy s, RngStream* rc_rng, std::span<const ValueNet> nets) {
    switch (s) {
        case Strategy::rc: return make_rc_sensor(rc_rng);
        case Strategy::cc: return make_cc_sensor();
        case Strategy::oc: return make_oc_sensor();
        case Strategy::cjcc: return make_net_sensor_centralized(&nets[0]);
        case Strategy::djcc: return make_net_sensor_distributed(nets);
    }
    return {};
}

namespace {

// One training phase. Exactly one side trains; the other is frozen inside the
// supplied policy factories.
struct PhaseRunner {
    const AppConfig& cfg;
    CpPomdpSpec spec;
    RunMetrics& metrics;
    int phase_id = 0;
    bool trainee_is_robot = true;

    DqnAgent* robot_agent = nullptr;              // trainee when trainee_is_robot
    const ValueNet* frozen_robot = nullptr;       // otherwise
    std::vector<DqnAgent>* sensor_agents = nullptr;  // trainee when !trainee_is_robot
    // frozen sensor side (benchmark rule or greedy nets); may capture rc_rng
    std::function<SensorPolicy(RngStream*)> frozen_sensors;

    void run(int64_t episodes) {
        for (int64_t ep = 0; ep < episodes; ++ep) {
            double eps = epsilon_for(ep, episodes, cfg.learner.eps_start, cfg.learner.eps_end);
            RngStream env_rng(derive_seed(cfg.seed, "train-env", ep_code(phase_id, ep)));
            RngStream pol_rng(derive_seed(cfg.seed, "train-pol", ep_code(phase_id, ep)));

            RobotPolicy robot_policy;
            SensorPolicy sensor_policy;
            EpisodeHooks hooks;

            if (trainee_is_robot) {
                robot_policy = [&](const ObservationStack& o) {
                    return robot_agent->act(o, eps, pol_rng);
                };
                hooks.on_robot_transition = [&](const Transition& t) { robot_agent->observe(t); };
                sensor_policy = frozen_sensors(&pol_rng);
            } else {
                robot_policy = greedy_policy(frozen_robot);
                hooks.want_sensor_transitions = true;
                hooks.on_sensor_transition = [&](int g, const Transition& t) {
                    (*sensor_agents)[static_cast<size_t>(g)].observe(t);
                };
                if (spec.mode == ChannelMode::centralized) {
                    sensor_policy.centralized = [&](const SensorContext& ctx) {
                        return (*sensor_agents)[0].act(ctx.observation(0), eps, pol_rng);
                    };
                } else {
                    sensor_policy.distributed = [&](const SensorContext& ctx,
                                                    std::vector<uint8_t>& actions) {
                        for (size_t g = 0; g < actions.size(); ++g)
                            actions[g] = static_cast<uint8_t>(
                                (*sensor_agents)[g].act(ctx.observation(static_cast<int>(g)), eps,
                                                        pol_rng));
                    };
                }
            }

            EpisodeLog log = run_episode(spec, cfg.env, robot_policy, sensor_policy, env_rng, &hooks);
            metrics.train_nstep.push_back(log.n_step);
            metrics.slots_simulated += log.n_step;
            if (!trainee_is_robot) {
                int collisions = 0;
                for (const auto& s : log.slots) collisions += s.collision ? 1 : 0;
                metrics.sensor_phase_collisions.push_back(collisions);
            }
        }
    }
};

}  // namespace

RunMetrics evaluate(const AppConfig& cfg, const ValueNet* robot_net,
                    std::span<const ValueNet> sensor_nets, int64_t n_test,
                    std::vector<EpisodeLog>* logs_out, int max_logs) {
    CpPomdpSpec spec = CpPomdpSpec::make(cfg.task, channel_mode_of(cfg.strategy), cfg.env,
                                         cfg.num_areas);
    MetricsAccumulator acc(cfg.env.map_size, cfg.num_areas);
    RobotPolicy robot = greedy_policy(robot_net);

    int64_t slots = 0;
    for (int64_t ep = 0; ep < n_test; ++ep) {
        uint64_t env_seed = derive_seed(cfg.seed, "test-env", static_cast<uint64_t>(ep));
        RngStream env_rng(env_seed);
        RngStream pol_rng(derive_seed(cfg.seed, "test-pol", static_cast<uint64_t>(ep)));
        SensorPolicy sensors = sensor_policy_for(cfg.strategy, &pol_rng, sensor_nets);
        EpisodeLog log = run_episode(spec, cfg.env, robot, sensors, env_rng);
        log.episode_seed = env_seed;
        acc.consume(log);
        slots += log.n_step;
        if (logs_out && static_cast<int>(logs_out->size()) < max_logs)
            logs_out->push_back(std::move(log));
    }
    RunMetrics m = acc.finish();
    m.slots_simulated = slots;
    return m;
}

TrainResult train_nc(Strategy strategy, const AppConfig& cfg) {
    if (strategy != Strategy::rc && strategy != Strategy::cc && strategy != Strategy::oc)
        throw ConfigError("train_nc expects one of rc, cc, oc");
    cfg.validate();

    TrainResult result;
    result.strategy = strategy;
    CpPomdpSpec spec =
        CpPomdpSpec::make(cfg.task, channel_mode_of(strategy), cfg.env, cfg.num_areas);

    DqnAgent robot(robot_net_spec(cfg), cfg.learner, derive_seed(cfg.seed, "agent", 0));

    PhaseRunner phase{.cfg = cfg, .spec = spec, .metrics = result.metrics};
    phase.phase_id = 0;
    phase.trainee_is_robot = true;
    phase.robot_agent = &robot;
    phase.frozen_sensors = [&](RngStream* rng) { return sensor_policy_for(strategy, rng, {}); };
    phase.run(cfg.schedule.n_train_robot);
    result.phases.push_back({"robot-1", 0, cfg.schedule.n_train_robot});

    result.robot_net = robot.net();
    AppConfig eval_cfg = cfg;
    eval_cfg.strategy = strategy;
    RunMetrics test = evaluate(eval_cfg, &result.robot_net, {}, cfg.schedule.n_test,
                               &result.test_logs, cfg.log_episodes);
    test.train_nstep = std::move(result.metrics.train_nstep);
    test.slots_simulated += result.metrics.slots_simulated;
    result.metrics = std::move(test);
    return result;
}

TrainResult train_jcc(Strategy strategy, const AppConfig& cfg) {
    if (strategy != Strategy::cjcc && strategy != Strategy::djcc)
        throw ConfigError("train_jcc expects cjcc or djcc");
    cfg.validate();

    TrainResult result;
    result.strategy = strategy;
    const ChannelMode mode = channel_mode_of(strategy);
    CpPomdpSpec spec = CpPomdpSpec::make(cfg.task, mode, cfg.env, cfg.num_areas);
    const int num_sensor_agents = mode == ChannelMode::distributed ? cfg.num_areas : 1;
    const LearnerConfig sensor_cfg = sensor_learner_cfg(cfg);

    std::optional<DqnAgent> robot;
    std::vector<DqnAgent> sensors;
    std::vector<ValueNet> sensor_nets;  // frozen greedy copies for robot phases
    bool sensors_trained = false;

    auto fresh_robot = [&](int phase_id) {
        if (!robot || cfg.schedule.reset_per_phase)
            robot.emplace(robot_net_spec(cfg), cfg.learner,
                          derive_seed(cfg.seed, "agent", static_cast<uint64_t>(phase_id)));
    };
    auto fresh_sensors = [&](int phase_id) {
        if (sensors.empty() || cfg.schedule.reset_per_phase) {
            sensors.clear();
            for (int g = 0; g < num_sensor_agents; ++g)
                sensors.emplace_back(sensor_net_spec(cfg, mode), sensor_cfg,
                                     derive_seed(cfg.seed, "agent",
                                                 (static_cast<uint64_t>(phase_id) << 8) | (g + 1)));
        }
    };
    auto snapshot_sensors = [&] {
        sensor_nets.clear();
        for (const auto& a : sensors) sensor_nets.push_back(a.net());
    };

    int phase_id = 0;
    auto robot_phase = [&](const std::string& name) {
        fresh_robot(phase_id);
        PhaseRunner phase{.cfg = cfg, .spec = spec, .metrics = result.metrics};
        phase.phase_id = phase_id;
        phase.trainee_is_robot = true;
        phase.robot_agent = &*robot;
        if (!sensors_trained) {
            Strategy initial = cfg.schedule.initial_sensor;
            phase.frozen_sensors = [&, initial](RngStream* rng) {
                if (mode == ChannelMode::distributed)
                    return fixed_distributed_policy(initial, rng);
                return sensor_policy_for(initial, rng, {});
            };
        } else {
            snapshot_sensors();
            phase.frozen_sensors = [&](RngStream*) {
                return sensor_policy_for(strategy, nullptr, sensor_nets);
            };
        }
        int64_t first = static_cast<int64_t>(result.metrics.train_nstep.size());
        phase.run(cfg.schedule.n_train_robot);
        result.phases.push_back({name, first, cfg.schedule.n_train_robot});
        ++phase_id;
    };
    auto sensor_phase = [&](const std::string& name) {
        fresh_sensors(phase_id);
        PhaseRunner phase{.cfg = cfg, .spec = spec, .metrics = result.metrics};
        phase.phase_id = phase_id;
        phase.trainee_is_robot = false;
        phase.frozen_robot = &robot->net();
        phase.sensor_agents = &sensors;
        int64_t first = static_cast<int64_t>(result.metrics.train_nstep.size());
        phase.run(cfg.schedule.n_train_sensor);
        result.phases.push_back({name, first, cfg.schedule.n_train_sensor});
        sensors_trained = true;
        ++phase_id;
    };

    for (int r = 1; r <= cfg.schedule.n_round; ++r) {
        robot_phase("robot-" + std::to_string(r));
        sensor_phase("sensor-" + std::to_string(r));
    }
    robot_phase("robot-final");

    result.robot_net = robot->net();
    snapshot_sensors();
    result.sensor_nets = sensor_nets;

    AppConfig eval_cfg = cfg;
    eval_cfg.strategy = strategy;
    RunMetrics test = evaluate(eval_cfg, &result.robot_net, result.sensor_nets,
                               cfg.schedule.n_test, &result.test_logs, cfg.log_episodes);
    test.train_nstep = std::move(result.metrics.train_nstep);
    test.sensor_phase_collisions = std::move(result.metrics.sensor_phase_collisions);
    test.slots_simulated += result.metrics.slots_simulated;
    result.metrics = std::move(test);
    return result;
}

TrainResult train(const AppConfig& cfg) {
    switch (cfg.strategy) {
        case Strategy::cjcc:
        case Strategy::djcc: return train_jcc(cfg.strategy, cfg);
        default: return train_nc(cfg.strategy, cfg);
    }
}

}  // namespace auvsim
