#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "auvsim/train.hpp"
#include "testutil.hpp"

using namespace auvsim;
namespace fs = std::filesystem;

namespace {

// settings that converge quickly on tiny maps
AppConfig desk4(Strategy s, Task task = Task::open_water) {
    AppConfig cfg;
    cfg.task = task;
    cfg.strategy = s;
    cfg.env.map_size = 4;
    cfg.env.steps_per_episode = 24;
    cfg.env.comm_period = 5;
    cfg.env.rho = 10.0;  // completion must dominate shaping-reward farming
    cfg.num_areas = 4;
    cfg.num_buoys = 4;
    cfg.learner.zeta = 3e-4;
    cfg.learner.train_freq = 2;
    cfg.learner.target_sync = 250;
    cfg.learner.min_buffer = 200;
    cfg.learner.buffer_capacity = 20000;
    cfg.sensor_buffer_capacity = 5000;
    cfg.schedule.n_train_robot = 2000;
    cfg.schedule.n_train_sensor = 80;
    cfg.schedule.n_round = 1;
    cfg.schedule.n_test = 200;
    cfg.seed = 11;
    cfg.log_episodes = 20;
    cfg.metrics_window = 100;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config file round-trips and mirrors the simulation-settings names") {
    AppConfig cfg;
    CHECK(cfg.env.map_size == 12);
    CHECK(cfg.num_buoys == 9);
    CHECK(cfg.num_areas == 9);
    CHECK(cfg.env.steps_per_episode == 100);
    CHECK(cfg.env.comm_period == 5);
    CHECK(cfg.env.rho == doctest::Approx(1.0));
    CHECK(cfg.env.sigma == doctest::Approx(0.22));
    CHECK(cfg.env.eta == doctest::Approx(1.0));
    CHECK(cfg.learner.lambda == doctest::Approx(0.95));
    CHECK(cfg.learner.zeta == doctest::Approx(1e-5));
    CHECK(cfg.schedule.n_round == 2);
    CHECK(cfg.schedule.n_train_robot == 100000);
    CHECK(cfg.schedule.n_train_sensor == 500000);
    CHECK(cfg.schedule.n_test == 10000);
    CHECK(cfg.env.v_robot == 2);

    std::string text = cfg.serialize();
    AppConfig parsed = AppConfig::from_text(text);
    CHECK(parsed.serialize() == text);

    AppConfig tweaked = AppConfig::from_text("K_p = 7\nrho=2.5\ntask = muling # comment\n");
    CHECK(tweaked.env.comm_period == 7);
    CHECK(tweaked.env.rho == doctest::Approx(2.5));
    CHECK(tweaked.task == Task::muling);

    CHECK_THROWS_AS(AppConfig::from_text("not_a_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(AppConfig::from_text("rho = abc\n"), ConfigError);
    CHECK_THROWS_AS(AppConfig::from_text("just a line\n"), ConfigError);

    AppConfig bad;
    bad.strategy = Strategy::djcc;
    bad.num_buoys = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.env.steps_per_episode = 70000;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("desk-scale oc training reaches shortest paths on an open 4x4 map") {
    AppConfig cfg = desk4(Strategy::oc);
    TrainResult result = train_nc(Strategy::oc, cfg);

    REQUIRE(result.test_logs.size() == 20);
    REQUIRE(result.metrics.test_nstep.size() == 200);

    // >= 95% of test episodes finish in exactly the BFS-optimal step count
    GridMap open_map(4);
    int optimal_hits = 0;
    for (const auto& log : result.test_logs) {
        int optimum = testutil::bfs_shortest(open_map, log.start, log.goal);
        optimal_hits += log.n_step == optimum ? 1 : 0;
    }
    // the retained logs are the first 20 test episodes; check the full run too
    CHECK(optimal_hits >= 19);
    NstepSummary s = result.metrics.test_summary;
    CHECK(s.p95 <= 7);  // max Manhattan distance on the open 4x4 is 6

    // smoothed training curve: the tail of training is no worse than its start
    auto curve = result.metrics.train_curve(100);
    REQUIRE(curve.size() >= 10);
    double mid = curve[curve.size() / 2].mean;
    double tail = curve.back().mean;
    CHECK(tail <= mid + 1.0);
    CHECK(curve.back().mean < curve.front().mean);

    // episode accounting: every simulated slot is on the books
    int64_t expected = 0;
    for (int v : result.metrics.train_nstep) expected += v;
    for (int v : result.metrics.test_nstep) expected += v;
    CHECK(result.metrics.slots_simulated == expected);
}

TEST_CASE("rc training on the centralized channel never sees a collision") {
    AppConfig cfg = desk4(Strategy::rc);
    cfg.schedule.n_train_robot = 60;
    cfg.schedule.n_test = 40;
    TrainResult result = train_nc(Strategy::rc, cfg);
    CHECK(result.metrics.collisions == 0);
    CHECK(result.metrics.comm_slots > 0);
    CHECK(result.metrics.deliveries == result.metrics.comm_slots);
}

TEST_CASE("train_nc rejects jcc strategies and train_jcc rejects benchmarks") {
    AppConfig cfg = desk4(Strategy::cjcc);
    CHECK_THROWS_AS(train_nc(Strategy::cjcc, cfg), ConfigError);
    CHECK_THROWS_AS(train_jcc(Strategy::cc, cfg), ConfigError);
}

TEST_CASE("jcc phases follow the round structure with a final robot phase") {
    AppConfig cfg = desk4(Strategy::cjcc);
    cfg.schedule.n_round = 2;
    cfg.schedule.n_train_robot = 4;
    cfg.schedule.n_train_sensor = 5;
    cfg.schedule.n_test = 10;
    cfg.learner.min_buffer = 8;
    cfg.learner.batch_size = 8;

    TrainResult result = train_jcc(Strategy::cjcc, cfg);
    REQUIRE(result.phases.size() == 5);
    CHECK(result.phases[0].name == "robot-1");
    CHECK(result.phases[1].name == "sensor-1");
    CHECK(result.phases[2].name == "robot-2");
    CHECK(result.phases[3].name == "sensor-2");
    CHECK(result.phases[4].name == "robot-final");
    CHECK(result.metrics.train_nstep.size() == 4 + 5 + 4 + 5 + 4);
    CHECK(result.metrics.sensor_phase_collisions.size() == 10);
    CHECK(result.sensor_nets.size() == 1);

    int64_t expected = 0;
    for (int v : result.metrics.train_nstep) expected += v;
    for (int v : result.metrics.test_nstep) expected += v;
    CHECK(result.metrics.slots_simulated == expected);

    SUBCASE("djcc trains one net per buoy") {
        AppConfig dj = desk4(Strategy::djcc);
        dj.schedule.n_round = 1;
        dj.schedule.n_train_robot = 4;
        dj.schedule.n_train_sensor = 5;
        dj.schedule.n_test = 8;
        dj.learner.min_buffer = 8;
        dj.learner.batch_size = 8;
        TrainResult djr = train_jcc(Strategy::djcc, dj);
        CHECK(djr.sensor_nets.size() == 4);
        CHECK(djr.phases.size() == 3);
    }
}

TEST_CASE("a frozen sensor net is bit-identical across a robot training phase") {
    AppConfig cfg = desk4(Strategy::cjcc);
    CpPomdpSpec spec = CpPomdpSpec::make(cfg.task, ChannelMode::centralized, cfg.env, 4);

    ValueNet sensor_net(NetSpec{5, 4, 4, 64}, 71);
    std::vector<float> before = sensor_net.params();
    std::vector<ValueNet> nets{sensor_net};

    LearnerConfig lc = cfg.learner;
    lc.min_buffer = 16;
    DqnAgent robot(NetSpec{4, 4, 4, 64}, lc, 72);
    for (int ep = 0; ep < 30; ++ep) {
        RngStream env_rng(derive_seed(5, "env", static_cast<uint64_t>(ep)));
        RngStream pol_rng(derive_seed(5, "pol", static_cast<uint64_t>(ep)));
        EpisodeHooks hooks;
        hooks.on_robot_transition = [&](const Transition& t) { robot.observe(t); };
        RobotPolicy policy = [&](const ObservationStack& o) { return robot.act(o, 0.5, pol_rng); };
        run_episode(spec, cfg.env, policy, make_net_sensor_centralized(&nets[0]), env_rng, &hooks);
    }
    CHECK(robot.updates() > 0);
    CHECK(nets[0].params() == before);
}

TEST_CASE("evaluation is deterministic in the master seed") {
    AppConfig cfg = desk4(Strategy::cc);
    cfg.schedule.n_test = 50;
    ValueNet robot(NetSpec{4, 4, 4, 64}, 123);

    std::vector<EpisodeLog> logs_a, logs_b;
    RunMetrics a = evaluate(cfg, &robot, {}, 50, &logs_a, 50);
    RunMetrics b = evaluate(cfg, &robot, {}, 50, &logs_b, 50);
    CHECK(a.test_nstep == b.test_nstep);
    CHECK(a.location_heat == b.location_heat);
    CHECK(a.tx_heat == b.tx_heat);
    REQUIRE(logs_a.size() == logs_b.size());
    for (size_t i = 0; i < logs_a.size(); ++i)
        CHECK(logs_a[i].serialize() == logs_b[i].serialize());
}

TEST_CASE("export writes a reproducible run directory and replay matches it") {
    fs::path dir = fs::temp_directory_path() / "auvsim_export_test";
    fs::remove_all(dir);

    AppConfig cfg = desk4(Strategy::cc, Task::muling);
    cfg.schedule.n_test = 30;
    cfg.log_episodes = 10;

    TrainResult shim;
    shim.strategy = Strategy::cc;
    shim.robot_net = ValueNet(NetSpec{4, 4, 4, 64}, 321);
    shim.metrics = evaluate(cfg, &shim.robot_net, {}, 30, &shim.test_logs, 10);
    export_run(dir.string(), cfg, shim);

    for (const char* name :
         {"config.snapshot", "seeds.manifest", "metrics.txt", "train_curve.tsv", "test_nstep.txt",
          "location_heatmap.txt", "transmission_heatmap.txt", "location_heatmap.ppm",
          "transmission_heatmap.ppm", "robot.ckpt", "episodes.log"})
        CHECK(fs::exists(dir / name));

    // the snapshot parses back to an equal config
    AppConfig parsed = AppConfig::from_file((dir / "config.snapshot").string());
    CHECK(parsed.serialize() == cfg.serialize());

    // heatmap matrix file: N rows by N columns of frequencies
    {
        std::ifstream f(dir / "location_heatmap.txt");
        std::string line;
        int rows = 0;
        double total = 0.0;
        while (std::getline(f, line)) {
            std::istringstream ls(line);
            double v;
            int cols = 0;
            while (ls >> v) {
                total += v;
                ++cols;
            }
            CHECK(cols == 4);
            ++rows;
        }
        CHECK(rows == 4);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }

    // re-exporting the same inputs is byte-identical except the manifest
    auto fingerprint = [&] {
        std::map<std::string, std::string> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().filename() != "seeds.manifest")
                files[entry.path().filename().string()] = slurp(entry.path());
        return files;
    };
    auto first = fingerprint();
    export_run(dir.string(), cfg, shim);
    CHECK(fingerprint() == first);

    // replay episode 3 from the manifest and compare against the stored log
    ReplayResult replay = replay_episode(dir.string(), 3);
    CHECK(replay.had_stored);
    CHECK(replay.matched_stored);
    auto stored = parse_episode_logs(slurp(dir / "episodes.log"));
    REQUIRE(stored.size() == 10);
    CHECK(stored[3].serialize() == replay.replayed.serialize());

    // plots re-render to identical bytes
    std::string ppm_before = slurp(dir / "location_heatmap.ppm");
    render_run_plots(dir.string());
    CHECK(slurp(dir / "location_heatmap.ppm") == ppm_before);

    fs::remove_all(dir);
}
