// Command-line runner: train strategies, evaluate checkpoints, re-render run
// plots, and replay logged episodes bit-exactly from a run's seed manifest.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>

#include "auvsim/train.hpp"

using namespace auvsim;

namespace {

struct CommonArgs {
    std::string task, strategy, config_path, out_dir, checkpoint;
    uint64_t seed = 0;
    bool seed_set = false;
    int64_t episodes = -1;
};

AppConfig resolve_config(const CommonArgs& args) {
    AppConfig cfg;
    if (!args.config_path.empty()) cfg = AppConfig::from_file(args.config_path);
    if (!args.task.empty()) cfg.task = task_from_name(args.task);
    if (!args.strategy.empty()) cfg.strategy = strategy_from_name(args.strategy);
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_strategy = true) {
    cmd->add_option("--task", args.task, "debris or muling");
    if (with_strategy)
        cmd->add_option("--strategy", args.strategy, "rc, cc, oc, cjcc or djcc");
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--seed", args.seed, "master seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--episodes", args.episodes, "episode count override");
}

void print_summary(const RunMetrics& m) {
    std::printf("episodes=%zu  N_step mean=%.2f  p5=%d p25=%d median=%d p75=%d p95=%d\n",
                m.test_nstep.size(), m.test_summary.mean, m.test_summary.p5, m.test_summary.p25,
                m.test_summary.p50, m.test_summary.p75, m.test_summary.p95);
    if (m.comm_slots > 0)
        std::printf("comm slots=%lld  deliveries=%lld  collisions=%lld (rate %.4f)\n",
                    static_cast<long long>(m.comm_slots), static_cast<long long>(m.deliveries),
                    static_cast<long long>(m.collisions), m.collision_rate());
}

int cmd_train(const CommonArgs& args) {
    AppConfig cfg = resolve_config(args);
    if (args.episodes > 0) cfg.schedule.n_train_robot = args.episodes;
    cfg.validate();
    std::printf("training %s on %s (N=%d, seed=%llu)\n",
                std::string(strategy_name(cfg.strategy)).c_str(),
                std::string(task_name(cfg.task)).c_str(), cfg.env.map_size,
                static_cast<unsigned long long>(cfg.seed));
    TrainResult result = train(cfg);
    print_summary(result.metrics);
    if (!args.out_dir.empty()) {
        export_run(args.out_dir, cfg, result);
        std::printf("run exported to %s\n", args.out_dir.c_str());
    }
    return kExitOk;
}

int cmd_eval(const CommonArgs& args) {
    AppConfig cfg = resolve_config(args);
    int64_t n_test = args.episodes > 0 ? args.episodes : cfg.schedule.n_test;
    cfg.validate();

    ValueNet robot;
    std::vector<ValueNet> sensor_nets;
    if (!args.checkpoint.empty()) {
        robot = net_from_checkpoint(load_checkpoint(args.checkpoint));
        std::filesystem::path dir = std::filesystem::path(args.checkpoint).parent_path();
        for (int g = 0;; ++g) {
            auto p = dir / ("sensor_" + std::to_string(g) + ".ckpt");
            if (!std::filesystem::exists(p)) break;
            sensor_nets.push_back(net_from_checkpoint(load_checkpoint(p.string())));
        }
    } else {
        // untrained net; still useful for channel statistics and smoke runs
        robot = ValueNet(NetSpec{4, cfg.env.map_size, kNumMoves, 64},
                         derive_seed(cfg.seed, "agent", 0));
    }

    std::vector<EpisodeLog> logs;
    RunMetrics m = evaluate(cfg, &robot, sensor_nets, n_test, &logs, cfg.log_episodes);
    print_summary(m);
    if (!args.out_dir.empty()) {
        TrainResult shim;
        shim.strategy = cfg.strategy;
        shim.robot_net = robot;
        shim.sensor_nets = sensor_nets;
        shim.metrics = m;
        shim.test_logs = std::move(logs);
        export_run(args.out_dir, cfg, shim);
        std::printf("run exported to %s\n", args.out_dir.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridworld AUV missions with goal-oriented sensor communication"};
    app.require_subcommand(1);

    CommonArgs train_args, eval_args;
    std::string plot_dir, replay_dir, replay_log;
    int64_t replay_index = 0;

    CLI::App* train_cmd = app.add_subcommand("train", "train a strategy and export the run");
    add_common(train_cmd, train_args);

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint (or a fresh net)");
    add_common(eval_cmd, eval_args);
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "robot checkpoint path");

    CLI::App* plot_cmd = app.add_subcommand("plot", "re-render heatmap images for a run");
    plot_cmd->add_option("--out", plot_dir, "run directory")->required();

    CLI::App* replay_cmd =
        app.add_subcommand("replay", "re-simulate a test episode from the seed manifest");
    replay_cmd->add_option("--out", replay_dir, "run directory")->required();
    replay_cmd->add_option("--episode", replay_index, "test episode index")->required();
    replay_cmd->add_option("--log", replay_log, "write the replayed episode log here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (plot_cmd->parsed()) {
            render_run_plots(plot_dir);
            std::printf("plots rendered in %s\n", plot_dir.c_str());
            return kExitOk;
        }
        if (replay_cmd->parsed()) {
            ReplayResult r = replay_episode(replay_dir, replay_index);
            std::fputs(r.replayed.serialize().c_str(), stdout);
            if (!replay_log.empty()) {
                std::FILE* f = std::fopen(replay_log.c_str(), "wb");
                if (!f) throw IoError("cannot open " + replay_log);
                std::fputs(r.replayed.serialize().c_str(), f);
                std::fclose(f);
            }
            if (r.had_stored)
                std::printf("stored log comparison: %s\n", r.matched_stored ? "MATCH" : "MISMATCH");
            return r.had_stored && !r.matched_stored ? 1 : kExitOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const TrainingFault& e) {
        std::fprintf(stderr, "training fault: %s\n", e.what());
        return kExitTrainingFault;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
