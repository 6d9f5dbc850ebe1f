#include "auvsim/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace auvsim {

void TrainingSchedule::validate() const {
    if (n_round < 0) throw ConfigError("n_round must be >= 0");
    if (n_train_robot < 1) throw ConfigError("n_train_robot must be >= 1");
    if (n_train_sensor < 1) throw ConfigError("n_train_sensor must be >= 1");
    if (n_test < 1) throw ConfigError("n_test must be >= 1");
    if (initial_sensor != Strategy::rc && initial_sensor != Strategy::cc &&
        initial_sensor != Strategy::oc)
        throw ConfigError("initial_sensor must be one of rc, cc, oc");
}

void AppConfig::validate() const {
    env.validate();
    learner.validate();
    schedule.validate();
    partition_map(env.map_size, num_areas);  // side length / divisibility check
    if (strategy == Strategy::djcc && num_buoys != num_areas)
        throw ConfigError("the distributed setup needs one buoy per area");
    if (num_buoys < 1) throw ConfigError("num_buoys must be >= 1");
    if (sensor_train_freq < 1) throw ConfigError("sensor_train_freq must be >= 1");
    if (env.steps_per_episode + 1 > 65535) throw ConfigError("steps_per_episode too large");
    if (metrics_window < 1) throw ConfigError("metrics_window must be >= 1");
    if (log_episodes < 0) throw ConfigError("log_episodes must be >= 0");
}

namespace {

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

int64_t parse_int(const std::string& v) {
    try {
        size_t used = 0;
        int64_t x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'");
    }
}

double parse_real(const std::string& v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'");
    }
}

uint64_t parse_u64(const std::string& v) {
    try {
        size_t used = 0;
        uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected an unsigned integer, got '" + v + "'");
    }
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}

}  // namespace

void AppConfig::set(const std::string& key, const std::string& value) {
    if (key == "task") task = task_from_name(value);
    else if (key == "strategy") strategy = strategy_from_name(value);
    else if (key == "map_size") env.map_size = static_cast<int>(parse_int(value));
    else if (key == "num_buoys") num_buoys = static_cast<int>(parse_int(value));
    else if (key == "num_areas") num_areas = static_cast<int>(parse_int(value));
    else if (key == "steps_per_episode") env.steps_per_episode = static_cast<int>(parse_int(value));
    else if (key == "K_p") env.comm_period = static_cast<int>(parse_int(value));
    else if (key == "rho") env.rho = parse_real(value);
    else if (key == "sigma") env.sigma = parse_real(value);
    else if (key == "eta") env.eta = parse_real(value);
    else if (key == "lambda") learner.lambda = parse_real(value);
    else if (key == "zeta") learner.zeta = parse_real(value);
    else if (key == "n_round") schedule.n_round = static_cast<int>(parse_int(value));
    else if (key == "n_train_robot") schedule.n_train_robot = parse_int(value);
    else if (key == "n_train_sensor") schedule.n_train_sensor = parse_int(value);
    else if (key == "n_test") schedule.n_test = parse_int(value);
    else if (key == "v_robot") env.v_robot = static_cast<int>(parse_int(value));
    else if (key == "sigma_ramp") env.sigma_ramp = parse_bool(value);
    else if (key == "seed") seed = parse_u64(value);
    else if (key == "oc_every_slot") oc_every_slot = parse_bool(value);
    else if (key == "batch_size") learner.batch_size = static_cast<int>(parse_int(value));
    else if (key == "train_freq") learner.train_freq = static_cast<int>(parse_int(value));
    else if (key == "sensor_train_freq") sensor_train_freq = static_cast<int>(parse_int(value));
    else if (key == "target_sync") learner.target_sync = static_cast<int>(parse_int(value));
    else if (key == "buffer_capacity")
        learner.buffer_capacity = static_cast<size_t>(parse_int(value));
    else if (key == "sensor_buffer_capacity")
        sensor_buffer_capacity = static_cast<size_t>(parse_int(value));
    else if (key == "min_buffer") learner.min_buffer = static_cast<int>(parse_int(value));
    else if (key == "eps_start") learner.eps_start = parse_real(value);
    else if (key == "eps_end") learner.eps_end = parse_real(value);
    else if (key == "initial_sensor") schedule.initial_sensor = strategy_from_name(value);
    else if (key == "reset_per_phase") schedule.reset_per_phase = parse_bool(value);
    else if (key == "metrics_window") metrics_window = static_cast<int>(parse_int(value));
    else if (key == "log_episodes") log_episodes = static_cast<int>(parse_int(value));
    else throw ConfigError("unknown config key: " + key);
}

std::string AppConfig::serialize() const {
    std::ostringstream out;
    char buf[64];
    auto real = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "task = " << task_name(task) << '\n';
    out << "strategy = " << strategy_name(strategy) << '\n';
    out << "map_size = " << env.map_size << '\n';
    out << "num_buoys = " << num_buoys << '\n';
    out << "num_areas = " << num_areas << '\n';
    out << "steps_per_episode = " << env.steps_per_episode << '\n';
    out << "K_p = " << env.comm_period << '\n';
    out << "rho = " << real(env.rho) << '\n';
    out << "sigma = " << real(env.sigma) << '\n';
    out << "eta = " << real(env.eta) << '\n';
    out << "lambda = " << real(learner.lambda) << '\n';
    out << "zeta = " << real(learner.zeta) << '\n';
    out << "n_round = " << schedule.n_round << '\n';
    out << "n_train_robot = " << schedule.n_train_robot << '\n';
    out << "n_train_sensor = " << schedule.n_train_sensor << '\n';
    out << "n_test = " << schedule.n_test << '\n';
    out << "v_robot = " << env.v_robot << '\n';
    out << "sigma_ramp = " << (env.sigma_ramp ? "true" : "false") << '\n';
    out << "seed = " << seed << '\n';
    out << "oc_every_slot = " << (oc_every_slot ? "true" : "false") << '\n';
    out << "batch_size = " << learner.batch_size << '\n';
    out << "train_freq = " << learner.train_freq << '\n';
    out << "sensor_train_freq = " << sensor_train_freq << '\n';
    out << "target_sync = " << learner.target_sync << '\n';
    out << "buffer_capacity = " << learner.buffer_capacity << '\n';
    out << "sensor_buffer_capacity = " << sensor_buffer_capacity << '\n';
    out << "min_buffer = " << learner.min_buffer << '\n';
    out << "eps_start = " << real(learner.eps_start) << '\n';
    out << "eps_end = " << real(learner.eps_end) << '\n';
    out << "initial_sensor = " << strategy_name(schedule.initial_sensor) << '\n';
    out << "reset_per_phase = " << (schedule.reset_per_phase ? "true" : "false") << '\n';
    out << "metrics_window = " << metrics_window << '\n';
    out << "log_episodes = " << log_episodes << '\n';
    return out.str();
}

AppConfig AppConfig::from_text(const std::string& text) {
    AppConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        cfg.set(key, value);
    }
    return cfg;
}

AppConfig AppConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str());
}

}  // namespace auvsim
