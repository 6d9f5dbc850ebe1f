#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "auvsim/train.hpp"

namespace auvsim {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("short write: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string format_matrix(const std::vector<double>& values, int rows, int cols) {
    std::string out;
    char buf[48];
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.9f", values[static_cast<size_t>(r) * cols + c]);
            out += buf;
            out += (c + 1 == cols) ? '\n' : ' ';
        }
    }
    return out;
}

std::vector<double> parse_matrix(const std::string& text, int* rows_out, int* cols_out) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string line;
    int rows = 0, cols = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double v;
        int c = 0;
        while (ls >> v) {
            values.push_back(v);
            ++c;
        }
        if (cols < 0) cols = c;
        else if (c != cols) throw IoError("ragged heatmap matrix");
        ++rows;
    }
    *rows_out = rows;
    *cols_out = cols;
    return values;
}

struct Rgb {
    unsigned char r, g, b;
};

// three-stop ramp from deep blue through teal to yellow
Rgb colormap(double t) {
    auto lerp = [](double a, double b, double u) { return a + (b - a) * u; };
    double r, g, b;
    if (t < 0.5) {
        double u = t * 2.0;
        r = lerp(13, 33, u);
        g = lerp(8, 145, u);
        b = lerp(135, 140, u);
    } else {
        double u = (t - 0.5) * 2.0;
        r = lerp(33, 253, u);
        g = lerp(145, 231, u);
        b = lerp(140, 37, u);
    }
    return {static_cast<unsigned char>(r), static_cast<unsigned char>(g),
            static_cast<unsigned char>(b)};
}

}  // namespace

void write_heatmap_ppm(const std::string& path, const std::vector<double>& values, int rows,
                       int cols, int cell_px) {
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;

    const int w = cols * cell_px, h = rows * cell_px;
    std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.reserve(out.size() + static_cast<size_t>(w) * h * 3);
    // grid row `rows` is the top of the map; render it at the top of the image
    for (int py = 0; py < h; ++py) {
        int r = rows - 1 - py / cell_px;
        for (int px = 0; px < w; ++px) {
            int c = px / cell_px;
            Rgb rgb = colormap(values[static_cast<size_t>(r) * cols + c] / vmax);
            out.push_back(static_cast<char>(rgb.r));
            out.push_back(static_cast<char>(rgb.g));
            out.push_back(static_cast<char>(rgb.b));
        }
    }
    write_file(path, out);
}

std::vector<EpisodeLog> parse_episode_logs(const std::string& text) {
    std::vector<EpisodeLog> logs;
    std::istringstream in(text);
    std::string line, block;
    while (std::getline(in, line)) {
        if (line.rfind("auvsim-episode", 0) == 0 && !block.empty()) {
            logs.push_back(EpisodeLog::parse(block));
            block.clear();
        }
        if (!line.empty()) block += line + '\n';
    }
    if (!block.empty()) logs.push_back(EpisodeLog::parse(block));
    return logs;
}

void export_run(const std::string& out_dir, const AppConfig& cfg, const TrainResult& result) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    write_file(dir / "config.snapshot", cfg.serialize());

    {
        std::ostringstream man;
        auto now = std::chrono::system_clock::now().time_since_epoch();
        man << "master_seed = " << cfg.seed << '\n';
        man << "derivation = splitmix64(master ^ fnv1a64(tag) ^ splitmix64(index + 0x1000))\n";
        man << "test_env_tag = test-env\n";
        man << "test_pol_tag = test-pol\n";
        man << "train_env_tag = train-env\n";
        man << "train_pol_tag = train-pol\n";
        man << "train_index = (phase << 40) | episode\n";
        man << "n_test = " << result.metrics.test_nstep.size() << '\n';
        man << "exported_unix_ms = "
            << std::chrono::duration_cast<std::chrono::milliseconds>(now).count() << '\n';
        write_file(dir / "seeds.manifest", man.str());
    }

    {
        const RunMetrics& m = result.metrics;
        std::ostringstream out;
        char buf[64];
        auto real = [&buf](double v) {
            std::snprintf(buf, sizeof buf, "%.9g", v);
            return std::string(buf);
        };
        out << "strategy = " << strategy_name(result.strategy) << '\n';
        out << "task = " << task_name(cfg.task) << '\n';
        out << "test_episodes = " << m.test_nstep.size() << '\n';
        out << "nstep_mean = " << real(m.test_summary.mean) << '\n';
        out << "nstep_p5 = " << m.test_summary.p5 << '\n';
        out << "nstep_p25 = " << m.test_summary.p25 << '\n';
        out << "nstep_p50 = " << m.test_summary.p50 << '\n';
        out << "nstep_p75 = " << m.test_summary.p75 << '\n';
        out << "nstep_p95 = " << m.test_summary.p95 << '\n';
        out << "comm_slots = " << m.comm_slots << '\n';
        out << "deliveries = " << m.deliveries << '\n';
        out << "collisions = " << m.collisions << '\n';
        out << "collision_rate = " << real(m.collision_rate()) << '\n';
        out << "slots_simulated = " << m.slots_simulated << '\n';
        out << "train_episodes = " << m.train_nstep.size() << '\n';
        for (const auto& p : result.phases)
            out << "phase " << p.name << " = " << p.first_episode << " +" << p.count << '\n';
        write_file(dir / "metrics.txt", out.str());
    }

    {
        std::ostringstream out;
        out << "episode\tmean\tp25\tp75\n";
        char buf[64];
        for (const auto& pt : result.metrics.train_curve(cfg.metrics_window)) {
            std::snprintf(buf, sizeof buf, "%" PRId64 "\t%.6f\t%d\t%d\n", pt.episode, pt.mean,
                          pt.p25, pt.p75);
            out << buf;
        }
        write_file(dir / "train_curve.tsv", out.str());
    }

    {
        std::string out;
        for (int v : result.metrics.test_nstep) out += std::to_string(v) + '\n';
        write_file(dir / "test_nstep.txt", out);
    }

    if (!result.metrics.sensor_phase_collisions.empty()) {
        std::string out;
        for (int v : result.metrics.sensor_phase_collisions) out += std::to_string(v) + '\n';
        write_file(dir / "sensor_collisions.txt", out);
    }

    const int n = cfg.env.map_size;
    const int side = static_cast<int>(std::lround(std::sqrt(cfg.num_areas)));
    write_file(dir / "location_heatmap.txt", format_matrix(result.metrics.location_heat, n, n));
    write_file(dir / "transmission_heatmap.txt",
               format_matrix(result.metrics.tx_heat, side, side));
    // images render from the written matrices so a later `plot` reproduces them
    render_run_plots(out_dir);

    save_checkpoint(result.robot_net, (dir / "robot.ckpt").string());
    for (size_t g = 0; g < result.sensor_nets.size(); ++g)
        save_checkpoint(result.sensor_nets[g],
                        (dir / ("sensor_" + std::to_string(g) + ".ckpt")).string());

    {
        std::string out;
        for (const auto& log : result.test_logs) out += log.serialize();
        write_file(dir / "episodes.log", out);
    }
}

void render_run_plots(const std::string& out_dir) {
    fs::path dir(out_dir);
    for (const char* name : {"location_heatmap", "transmission_heatmap"}) {
        fs::path txt = dir / (std::string(name) + ".txt");
        if (!fs::exists(txt)) continue;
        int rows = 0, cols = 0;
        std::vector<double> values = parse_matrix(read_file(txt), &rows, &cols);
        write_heatmap_ppm((dir / (std::string(name) + ".ppm")).string(), values, rows, cols);
    }
}

ReplayResult replay_episode(const std::string& out_dir, int64_t index) {
    fs::path dir(out_dir);
    AppConfig cfg = AppConfig::from_file((dir / "config.snapshot").string());

    ValueNet robot = net_from_checkpoint(load_checkpoint((dir / "robot.ckpt").string()));
    std::vector<ValueNet> sensor_nets;
    for (int g = 0;; ++g) {
        fs::path p = dir / ("sensor_" + std::to_string(g) + ".ckpt");
        if (!fs::exists(p)) break;
        sensor_nets.push_back(net_from_checkpoint(load_checkpoint(p.string())));
    }

    CpPomdpSpec spec =
        CpPomdpSpec::make(cfg.task, channel_mode_of(cfg.strategy), cfg.env, cfg.num_areas);
    uint64_t env_seed = derive_seed(cfg.seed, "test-env", static_cast<uint64_t>(index));
    RngStream env_rng(env_seed);
    RngStream pol_rng(derive_seed(cfg.seed, "test-pol", static_cast<uint64_t>(index)));
    SensorPolicy sensors = sensor_policy_for(cfg.strategy, &pol_rng, sensor_nets);
    RobotPolicy policy = greedy_policy(&robot);

    ReplayResult result;
    result.replayed = run_episode(spec, cfg.env, policy, sensors, env_rng);
    result.replayed.episode_seed = env_seed;

    fs::path log_path = dir / "episodes.log";
    if (fs::exists(log_path)) {
        auto logs = parse_episode_logs(read_file(log_path));
        if (index >= 0 && index < static_cast<int64_t>(logs.size())) {
            result.had_stored = true;
            result.matched_stored =
                logs[static_cast<size_t>(index)].serialize() == result.replayed.serialize();
        }
    }
    return result;
}

}  // namespace auvsim
