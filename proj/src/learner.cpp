#include "auvsim/learner.hpp"

#include <cmath>

namespace auvsim {

void LearnerConfig::validate() const {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw ConfigError("lambda must be in [0, 1)");
    if (!(zeta > 0.0)) throw ConfigError("zeta must be positive");
    if (eps_start < eps_end || eps_end < 0.0 || eps_start > 1.0)
        throw ConfigError("epsilon schedule must satisfy 1 >= eps_start >= eps_end >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (target_sync < 1) throw ConfigError("target_sync must be >= 1");
    if (buffer_capacity < static_cast<size_t>(batch_size))
        throw ConfigError("buffer_capacity must hold at least one batch");
    if (train_freq < 1) throw ConfigError("train_freq must be >= 1");
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[head_] = std::move(t);  // FIFO eviction
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<const Transition*> ReplayBuffer::sample(int batch) {
    std::vector<const Transition*> out;
    out.reserve(static_cast<size_t>(batch));
    for (int i = 0; i < batch; ++i)
        out.push_back(&data_[static_cast<size_t>(rng_.uniform_int(0, static_cast<int>(size()) - 1))]);
    return out;
}

void ReplayBuffer::clear() {
    data_.clear();
    head_ = 0;
}

double epsilon_for(int64_t episode, int64_t total_episodes, double eps_start, double eps_end) {
    if (total_episodes <= 1) return eps_end;
    double f = static_cast<double>(episode) / static_cast<double>(total_episodes - 1);
    f = std::clamp(f, 0.0, 1.0);
    return eps_start + (eps_end - eps_start) * f;
}

int argmax_index(const float* values, int count) {
    int best = 0;
    for (int i = 1; i < count; ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

int egreedy_action(const std::vector<float>& values, double eps, RngStream& rng) {
    if (eps > 0.0 && rng.bernoulli(eps))
        return rng.uniform_int(0, static_cast<int>(values.size()) - 1);
    return argmax_index(values.data(), static_cast<int>(values.size()));
}

double double_q_target(const ValueNet& online, const ValueNet& target, const Transition& t,
                       double lambda) {
    if (t.done) return t.reward;
    std::vector<float> q_online = online.forward(t.next);
    int a_star = argmax_index(q_online.data(), static_cast<int>(q_online.size()));
    std::vector<float> q_target = target.forward(t.next);
    return t.reward + lambda * static_cast<double>(q_target[a_star]);
}

double td_step(ValueNet& net, const ValueNet& target, const std::vector<const Transition*>& batch,
               AdamOpt<float>& opt, double lambda, ValueNet::Workspace& ws) {
    const int B = static_cast<int>(batch.size());
    if (B == 0) throw std::logic_error("td_step on an empty batch");

    // targets: online net picks the argmax, target net scores it
    std::vector<const ObservationStack*> next_obs;
    next_obs.reserve(static_cast<size_t>(B));
    for (const Transition* t : batch) next_obs.push_back(&t->next);
    ValueNet::Workspace scratch;
    MatX<float> q_next_online = net.forward_train(next_obs, scratch);
    MatX<float> q_next_target = target.forward_train(next_obs, scratch);

    std::vector<double> y(static_cast<size_t>(B));
    for (int i = 0; i < B; ++i) {
        const Transition& t = *batch[i];
        if (t.done) {
            y[i] = t.reward;
        } else {
            int a_star = 0;
            for (int a = 1; a < q_next_online.rows(); ++a)
                if (q_next_online(a, i) > q_next_online(a_star, i)) a_star = a;
            y[i] = t.reward + lambda * static_cast<double>(q_next_target(a_star, i));
        }
    }

    std::vector<const ObservationStack*> obs;
    obs.reserve(static_cast<size_t>(B));
    for (const Transition* t : batch) obs.push_back(&t->obs);
    MatX<float> q = net.forward_train(obs, ws);

    MatX<float> dout = MatX<float>::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (int i = 0; i < B; ++i) {
        double diff = static_cast<double>(q(batch[i]->action, i)) - y[i];
        loss += diff * diff;
        dout(batch[i]->action, i) = static_cast<float>(2.0 * diff / B);
    }
    loss /= B;

    std::vector<float> grad;
    net.backward(dout, ws, grad);
    opt.step(net.params(), grad);
    return loss;
}

double QTable::q(int64_t obs, int action) const {
    auto it = table_.find(obs);
    return it == table_.end() ? 0.0 : it->second[static_cast<size_t>(action)];
}

std::vector<double>& QTable::row_mut(int64_t obs) {
    auto it = table_.find(obs);
    if (it == table_.end())
        it = table_.emplace(obs, std::vector<double>(static_cast<size_t>(num_actions_), 0.0)).first;
    return it->second;
}

const std::vector<double>& QTable::row(int64_t obs) const {
    return const_cast<QTable*>(this)->row_mut(obs);
}

void QTable::update(int64_t obs, int action, double reward, int64_t next_obs, double alpha,
                    double lambda) {
    double best_next = 0.0;
    auto it = table_.find(next_obs);
    if (it != table_.end()) {
        best_next = it->second[0];
        for (double v : it->second) best_next = std::max(best_next, v);
    }
    double& cell = row_mut(obs)[static_cast<size_t>(action)];
    cell = alpha * (reward + lambda * best_next) + (1.0 - alpha) * cell;
}

int QTable::greedy(int64_t obs) const {
    const auto& rw = row(obs);
    int best = 0;
    for (int a = 1; a < num_actions_; ++a)
        if (rw[static_cast<size_t>(a)] > rw[static_cast<size_t>(best)]) best = a;
    return best;
}

DqnAgent::DqnAgent(const NetSpec& spec, const LearnerConfig& cfg, uint64_t seed)
    : cfg_(cfg),
      net_(spec, derive_seed(seed, "net-init")),
      target_(spec, derive_seed(seed, "net-init")),
      buffer_(cfg.buffer_capacity, derive_seed(seed, "sampler")) {
    cfg_.validate();
    opt_.lr = cfg.zeta;
}

int DqnAgent::act(const ObservationStack& obs, double eps, RngStream& rng) {
    if (eps >= 1.0) return rng.uniform_int(0, net_.num_actions() - 1);  // skip the forward
    std::vector<float> q = net_.forward(obs);
    return egreedy_action(q, eps, rng);
}

int DqnAgent::act_greedy(const ObservationStack& obs) const {
    std::vector<float> q = net_.forward(obs);
    return argmax_index(q.data(), static_cast<int>(q.size()));
}

void DqnAgent::observe(Transition t) {
    buffer_.push(std::move(t));
    ++observed_;
    if (observed_ % cfg_.train_freq != 0) return;
    if (buffer_.size() < static_cast<size_t>(std::max(cfg_.min_buffer, cfg_.batch_size))) return;

    auto batch = buffer_.sample(cfg_.batch_size);
    last_loss_ = td_step(net_, target_, batch, opt_, cfg_.lambda, ws_);
    ++updates_;
    if (!std::isfinite(last_loss_)) {
        if (++nonfinite_streak_ >= 10)
            throw TrainingFault("non-finite loss for 10 consecutive updates");
    } else {
        nonfinite_streak_ = 0;
    }
    if (updates_ % cfg_.target_sync == 0) target_.copy_params_from(net_);
}

}  // namespace auvsim
