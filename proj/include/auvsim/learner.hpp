#pragma once

#include <unordered_map>

#include "auvsim/net.hpp"

namespace auvsim {

struct LearnerConfig {
    double lambda = 0.95;  // discount factor
    double zeta = 1e-5;    // max learning rate
    double eps_start = 0.9, eps_end = 0.1;
    int batch_size = 32;
    int target_sync = 1000;         // gradient updates between target syncs
    size_t buffer_capacity = 50000;
    int train_freq = 4;             // decisions per gradient update
    int min_buffer = 500;           // transitions before updates start
    void validate() const;
};

// Bounded FIFO of transitions with a uniform sampler.
class ReplayBuffer {
public:
    ReplayBuffer(size_t capacity, uint64_t sampler_seed)
        : capacity_(capacity), rng_(sampler_seed) {}

    void push(Transition t);
    size_t size() const { return data_.size(); }
    bool can_sample(int batch) const { return size() >= static_cast<size_t>(batch); }
    std::vector<const Transition*> sample(int batch);
    void clear();

private:
    size_t capacity_;
    size_t head_ = 0;  // next eviction slot once full
    std::vector<Transition> data_;
    RngStream rng_;
};

// Linear decay across a training phase, clamped at the endpoints.
double epsilon_for(int64_t episode, int64_t total_episodes, double eps_start = 0.9,
                   double eps_end = 0.1);

int argmax_index(const float* values, int count);  // lowest-index tie-break

// Greedy with probability 1-eps, uniform over all actions otherwise.
int egreedy_action(const std::vector<float>& values, double eps, RngStream& rng);

// y = r for terminal transitions, else r + lambda * Q_target(o')[argmax_a Q_online(o')[a]].
double double_q_target(const ValueNet& online, const ValueNet& target, const Transition& t,
                       double lambda);

// One Double-DQN update on the batch: mean squared TD error, one optimizer step.
// Returns the pre-update loss.
double td_step(ValueNet& net, const ValueNet& target, const std::vector<const Transition*>& batch,
               AdamOpt<float>& opt, double lambda, ValueNet::Workspace& ws);

// Tabular Q-learning oracle: Q'(o,a) = alpha*(r + lambda*max_a' Q(o',a')) + (1-alpha)*Q(o,a).
class QTable {
public:
    explicit QTable(int num_actions) : num_actions_(num_actions) {}
    double q(int64_t obs, int action) const;
    const std::vector<double>& row(int64_t obs) const;
    void update(int64_t obs, int action, double reward, int64_t next_obs, double alpha,
                double lambda);
    int greedy(int64_t obs) const;
    size_t visited() const { return table_.size(); }

private:
    int num_actions_;
    std::vector<double>& row_mut(int64_t obs);
    mutable std::unordered_map<int64_t, std::vector<double>> table_;
};

// Net + target net + replay + optimizer, wired for one trainee.
class DqnAgent {
public:
    DqnAgent(const NetSpec& spec, const LearnerConfig& cfg, uint64_t seed);

    int act(const ObservationStack& obs, double eps, RngStream& rng);
    int act_greedy(const ObservationStack& obs) const;

    // Buffers the transition and runs a gradient update every train_freq
    // observations (after warmup). Throws TrainingFault after a streak of
    // non-finite losses.
    void observe(Transition t);

    const ValueNet& net() const { return net_; }
    ValueNet& net() { return net_; }
    int64_t updates() const { return updates_; }
    double last_loss() const { return last_loss_; }

private:
    LearnerConfig cfg_;
    ValueNet net_, target_;
    AdamOpt<float> opt_;
    ReplayBuffer buffer_;
    ValueNet::Workspace ws_;
    int64_t observed_ = 0, updates_ = 0;
    int nonfinite_streak_ = 0;
    double last_loss_ = 0.0;
};

}  // namespace auvsim
