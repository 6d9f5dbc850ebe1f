// Scratch harness for hyperparameter probing at desk scale. Not installed.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "auvsim/train.hpp"
#include "auvsim/learner.hpp"

using namespace auvsim;

int main(int argc, char** argv) {
    AppConfig cfg;
    cfg.task = Task::open_water;
    cfg.strategy = Strategy::oc;
    cfg.env.map_size = 4;
    cfg.env.steps_per_episode = 24;
    cfg.num_areas = 4;
    cfg.num_buoys = 4;
    cfg.learner.zeta = 3e-4;
    cfg.learner.train_freq = 2;
    cfg.learner.target_sync = 250;
    cfg.learner.min_buffer = 200;
    cfg.schedule.n_train_robot = 2000;
    cfg.schedule.n_test = 200;
    cfg.seed = 11;
    cfg.log_episodes = 0;
    cfg.metrics_window = 100;

    for (int i = 1; i + 1 < argc; i += 2) cfg.set(argv[i], argv[i + 1]);
    cfg.validate();

    CpPomdpSpec spec = CpPomdpSpec::make(cfg.task, channel_mode_of(cfg.strategy), cfg.env,
                                         cfg.num_areas);
    DqnAgent robot(NetSpec{4, cfg.env.map_size, kNumMoves, 64}, cfg.learner,
                   derive_seed(cfg.seed, "agent", 0));

    int64_t episodes = cfg.schedule.n_train_robot;
    double loss_acc = 0.0;
    int64_t loss_n = 0, nstep_acc = 0, goals = 0;
    for (int64_t ep = 0; ep < episodes; ++ep) {
        double eps = epsilon_for(ep, episodes);
        RngStream env_rng(derive_seed(cfg.seed, "train-env", ep));
        RngStream pol_rng(derive_seed(cfg.seed, "train-pol", ep));
        EpisodeHooks hooks;
        hooks.on_robot_transition = [&](const Transition& t) {
            robot.observe(t);
            if (robot.updates() > 0) {
                loss_acc += robot.last_loss();
                ++loss_n;
            }
        };
        RobotPolicy policy = [&](const ObservationStack& o) { return robot.act(o, eps, pol_rng); };
        EpisodeLog log = run_episode(spec, cfg.env, policy, {}, env_rng, &hooks);
        nstep_acc += log.n_step;
        goals += log.cause == TerminalCause::goal ? 1 : 0;
        if ((ep + 1) % 200 == 0) {
            std::printf("ep %5lld  eps %.2f  mean_nstep %5.1f  goal%% %4.1f  mean_loss %.5f\n",
                        static_cast<long long>(ep + 1), eps, nstep_acc / 200.0,
                        100.0 * goals / 200.0, loss_n ? loss_acc / loss_n : 0.0);
            nstep_acc = 0;
            goals = 0;
            loss_acc = 0;
            loss_n = 0;
        }
    }

    // probe: Q values on a handcrafted state, then one greedy rollout trace
    const int n = cfg.env.map_size;
    BeliefGrid belief(n);
    AgeGrid age(n, static_cast<uint16_t>(cfg.env.steps_per_episode + 1));
    GridMap map(n);
    sense_local(belief, age, map, {2, 1}, n);  // radius n: everything seen
    apply_full_map_tx(belief, age, map);
    ObservationStack probe = build_robot_observation(belief, age, {2, 1}, {2, n});
    auto q = robot.net().forward(probe);
    std::printf("Q at (2,1)->goal(2,%d): +c %.4f  -c %.4f  +r %.4f  -r %.4f\n", n, q[0], q[1],
                q[2], q[3]);

    EnvState env;
    env.task = Task::open_water;
    env.map = GridMap(n);
    env.robot = {{1, 1}, {4, n}};
    BeliefGrid b2(n);
    AgeGrid a2(n, static_cast<uint16_t>(cfg.env.steps_per_episode + 1));
    std::printf("greedy rollout from (1,1) to (4,%d): ", n);
    for (int k = 0; k < 16; ++k) {
        age_tick(a2);
        sense_local(b2, a2, env.map, env.robot.pos, cfg.env.v_robot);
        apply_full_map_tx(b2, a2, env.map);
        ObservationStack o = build_robot_observation(b2, a2, env.robot.pos, env.robot.goal);
        int a = robot.act_greedy(o);
        step_robot(env, a);
        std::printf("(%d,%d) ", env.robot.pos.c, env.robot.pos.r);
        if (env.robot.pos == env.robot.goal) break;
    }
    std::printf("\n");
    return 0;
}
