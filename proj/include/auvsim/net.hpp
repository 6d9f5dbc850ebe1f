#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "auvsim/episode.hpp"
#include "auvsim/rng.hpp"

namespace auvsim {

struct LayerGeom {
    enum class Kind : uint8_t { conv = 0, linear = 1 };
    Kind kind = Kind::conv;
    int in_c = 0, out_c = 0;
    int k = 0, stride = 0, pad = 0;  // conv only
    int in_h = 0, out_h = 0;         // square spatial extents
    int weight_count() const {
        return kind == Kind::conv ? out_c * in_c * k * k : out_c * in_c;
    }
};

// conv(c -> 64, 3x3, stride 1, pad 1) -> conv(64 -> 64, 3x3, stride 4)
// -> conv(64 -> 64, 3x3, stride 4) -> linear(64 -> actions),
// rectifier between layers, linear output. The stride-4 pads are chosen per
// map size so the final features see every input pixel; on a 12x12 map the
// spatial path is 12 -> 12 -> 3 -> 1, feeding the linear layer 64 features.
// For map sizes where the stack does not collapse to 1x1, a global average
// pool precedes the linear layer.
struct NetSpec {
    int input_channels = 4;
    int grid_n = 12;
    int num_actions = 4;
    int hidden_channels = 64;

    std::vector<LayerGeom> layers() const;
    bool operator==(const NetSpec&) const = default;
};

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
class ValueNetT {
public:
    ValueNetT() = default;
    ValueNetT(const NetSpec& spec, uint64_t init_seed);

    const NetSpec& spec() const { return spec_; }
    const std::vector<LayerGeom>& geometry() const { return geom_; }
    int num_actions() const { return spec_.num_actions; }
    size_t num_params() const { return params_.size(); }
    std::vector<T>& params() { return params_; }
    const std::vector<T>& params() const { return params_; }

    // Scratch buffers reused across training steps.
    struct Workspace {
        MatX<T> a0;
        std::array<MatX<T>, 3> cols;
        std::array<MatX<T>, 3> act;
        MatX<T> pooled;
        MatX<T> d_act, d_cols, d_prev;
    };

    // Single-observation action values.
    std::vector<T> forward(const ObservationStack& obs) const;

    // Batched forward; output is (actions x batch), caching activations for backward.
    MatX<T> forward_train(const std::vector<const ObservationStack*>& obs, Workspace& ws) const;

    // Backpropagates d(loss)/d(output) through the cached activations into a
    // flat gradient laid out like params().
    void backward(const MatX<T>& dout, Workspace& ws, std::vector<T>& grad) const;

    void copy_params_from(const ValueNetT& other) { params_ = other.params_; }

    // flat offsets of each layer's weights and biases, in checkpoint order
    size_t weight_offset(int layer) const { return offsets_[layer].first; }
    size_t bias_offset(int layer) const { return offsets_[layer].second; }

private:
    NetSpec spec_;
    std::vector<LayerGeom> geom_;
    std::vector<T> params_;
    std::vector<std::pair<size_t, size_t>> offsets_;
};

using ValueNet = ValueNetT<float>;

// Adaptive moment estimation; `lr` is the maximum step size. Moment updates
// run in double regardless of the parameter type.
template <typename T>
struct AdamOpt {
    double lr = 1e-5;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int64_t t = 0;
    std::vector<double> m, v;

    void step(std::vector<T>& params, const std::vector<T>& grad);
    void reset() { t = 0; m.clear(); v.clear(); }
};

// Max relative error between analytic and central finite-difference gradients
// of Q(obs)[action] over `subset` randomly chosen parameters.
double grad_check(const ValueNetT<double>& net, const ObservationStack& obs, int action,
                  int subset, uint64_t seed, double h = 1e-5);

// Checkpoint file: "AVQN" magic, format version, net spec, an opaque RNG-state
// blob, then the parameters as a flat little-endian float32 array in layer
// order (conv1 W, conv1 b, conv2 W, conv2 b, conv3 W, conv3 b, fc W, fc b).
struct Checkpoint {
    NetSpec spec;
    std::string rng_state;
    std::vector<float> params;
};

void save_checkpoint(const ValueNet& net, const std::string& path,
                     const std::string& rng_state = {});
Checkpoint load_checkpoint(const std::string& path);
ValueNet net_from_checkpoint(const Checkpoint& ck);

}  // namespace auvsim
