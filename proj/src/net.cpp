#include "auvsim/net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace auvsim {

namespace {

// Padding for the two stride-4 convolutions. A fixed pad leaves whole rows of
// the input outside the receptive field of the final features for many map
// sizes (stride 4 samples 3 of every 4 rows, and the second stage prunes
// further), so search the small pad space and keep the choice that lets every
// input pixel reach the output; full coverage outranks the 1x1 no-pool
// endpoint. For the 12x12 map this picks pads (0,0): 12 -> 12 -> 3 -> 1.
std::pair<int, int> stride4_pads(int n) {
    auto sampled = [](int out, int pad, int bound) {
        std::vector<bool> rows(static_cast<size_t>(bound), false);
        for (int o = 0; o < out; ++o)
            for (int t = 0; t < 3; ++t) {
                int r = 4 * o - pad + t;
                if (r >= 0 && r < bound) rows[static_cast<size_t>(r)] = true;
            }
        return rows;
    };

    int best_p2 = 1, best_p3 = 1;
    long best_score = -1;
    for (int p2 = 0; p2 <= 2; ++p2) {
        if (n + 2 * p2 < 3) continue;
        int out2 = (n + 2 * p2 - 3) / 4 + 1;
        for (int p3 = 0; p3 <= 2; ++p3) {
            if (out2 + 2 * p3 < 3) continue;
            int out3 = (out2 + 2 * p3 - 3) / 4 + 1;

            std::vector<bool> used2 = sampled(out3, p3, out2);
            std::vector<bool> used1(static_cast<size_t>(n), false);
            for (int o2 = 0; o2 < out2; ++o2) {
                if (!used2[static_cast<size_t>(o2)]) continue;
                for (int t = 0; t < 3; ++t) {
                    int r = 4 * o2 - p2 + t;
                    if (r >= 0 && r < n) used1[static_cast<size_t>(r)] = true;
                }
            }
            // conv1 is k3 s1 p1: input row i reaches conv1 rows i-1 .. i+1
            int covered = 0;
            for (int i = 0; i < n; ++i) {
                bool hit = false;
                for (int r = i - 1; r <= i + 1 && !hit; ++r)
                    hit = r >= 0 && r < n && used1[static_cast<size_t>(r)];
                covered += hit ? 1 : 0;
            }
            long score = (static_cast<long>(covered) << 16) |
                         (static_cast<long>(out3 == 1 ? 1 : 0) << 8) |
                         static_cast<long>(63 - (out3 * 8 + p2 * 3 + p3));
            if (score > best_score) {
                best_score = score;
                best_p2 = p2;
                best_p3 = p3;
            }
        }
    }
    if (best_score < 0) throw ConfigError("map too small for the conv stack");
    return {best_p2, best_p3};
}

}  // namespace

std::vector<LayerGeom> NetSpec::layers() const {
    auto conv_out = [](int h, int k, int stride, int pad) {
        return (h + 2 * pad - k) / stride + 1;
    };
    auto [p2, p3] = stride4_pads(grid_n);
    const int strides[3] = {1, 4, 4};
    const int pads[3] = {1, p2, p3};

    std::vector<LayerGeom> g;
    int h = grid_n, c = input_channels;
    for (int i = 0; i < 3; ++i) {
        LayerGeom l;
        l.kind = LayerGeom::Kind::conv;
        l.in_c = c;
        l.out_c = hidden_channels;
        l.k = 3;
        l.stride = strides[i];
        l.pad = pads[i];
        l.in_h = h;
        l.out_h = conv_out(h, l.k, l.stride, l.pad);
        if (l.out_h < 1) throw ConfigError("map too small for the conv stack");
        g.push_back(l);
        h = l.out_h;
        c = l.out_c;
    }
    LayerGeom fc;
    fc.kind = LayerGeom::Kind::linear;
    fc.in_c = hidden_channels;  // after global average pool when h > 1
    fc.out_c = num_actions;
    fc.in_h = h;
    fc.out_h = 1;
    g.push_back(fc);
    return g;
}

template <typename T>
ValueNetT<T>::ValueNetT(const NetSpec& spec, uint64_t init_seed) : spec_(spec) {
    geom_ = spec.layers();
    size_t total = 0;
    for (const auto& l : geom_) {
        offsets_.push_back({total, total + static_cast<size_t>(l.weight_count())});
        total += static_cast<size_t>(l.weight_count()) + l.out_c;
    }
    params_.resize(total);
    for (size_t li = 0; li < geom_.size(); ++li) {
        const auto& l = geom_[li];
        int fan_in = l.kind == LayerGeom::Kind::conv ? l.in_c * l.k * l.k : l.in_c;
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        RngStream rng(derive_seed(init_seed, "layer", li));
        size_t count = static_cast<size_t>(l.weight_count()) + l.out_c;
        T* p = params_.data() + offsets_[li].first;
        for (size_t i = 0; i < count; ++i)
            p[i] = static_cast<T>((2.0 * rng.uniform01() - 1.0) * bound);
    }
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
void im2col(const MatX<T>& src, int batch, int h_in, int k, int stride, int pad, int h_out,
            MatX<T>& cols) {
    const int in_c = static_cast<int>(src.rows());
    cols.resize(static_cast<Eigen::Index>(in_c) * k * k,
                static_cast<Eigen::Index>(batch) * h_out * h_out);
    for (int b = 0; b < batch; ++b) {
        for (int y = 0; y < h_out; ++y) {
            for (int x = 0; x < h_out; ++x) {
                Eigen::Index col = (static_cast<Eigen::Index>(b) * h_out + y) * h_out + x;
                T* dst = cols.data() + col * cols.rows();
                for (int ic = 0; ic < in_c; ++ic) {
                    for (int ky = 0; ky < k; ++ky) {
                        int iy = y * stride - pad + ky;
                        for (int kx = 0; kx < k; ++kx) {
                            int ix = x * stride - pad + kx;
                            T v = T(0);
                            if (iy >= 0 && iy < h_in && ix >= 0 && ix < h_in)
                                v = src(ic, (static_cast<Eigen::Index>(b) * h_in + iy) * h_in + ix);
                            *dst++ = v;
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im(const MatX<T>& cols, int batch, int h_in, int k, int stride, int pad, int h_out,
            int in_c, MatX<T>& dst) {
    dst.setZero(in_c, static_cast<Eigen::Index>(batch) * h_in * h_in);
    for (int b = 0; b < batch; ++b) {
        for (int y = 0; y < h_out; ++y) {
            for (int x = 0; x < h_out; ++x) {
                Eigen::Index col = (static_cast<Eigen::Index>(b) * h_out + y) * h_out + x;
                const T* src = cols.data() + col * cols.rows();
                for (int ic = 0; ic < in_c; ++ic) {
                    for (int ky = 0; ky < k; ++ky) {
                        int iy = y * stride - pad + ky;
                        for (int kx = 0; kx < k; ++kx) {
                            int ix = x * stride - pad + kx;
                            if (iy >= 0 && iy < h_in && ix >= 0 && ix < h_in)
                                dst(ic, (static_cast<Eigen::Index>(b) * h_in + iy) * h_in + ix) +=
                                    *src;
                            ++src;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

template <typename T>
MatX<T> ValueNetT<T>::forward_train(const std::vector<const ObservationStack*>& obs,
                                    Workspace& ws) const {
    const int batch = static_cast<int>(obs.size());
    const int n = spec_.grid_n;
    const Eigen::Index plane = static_cast<Eigen::Index>(n) * n;
    ws.a0.resize(spec_.input_channels, batch * plane);

    std::vector<float> buf(static_cast<size_t>(spec_.input_channels) * plane);
    for (int b = 0; b < batch; ++b) {
        obs[b]->write_floats(buf.data());
        for (int c = 0; c < spec_.input_channels; ++c)
            for (Eigen::Index px = 0; px < plane; ++px)
                ws.a0(c, b * plane + px) = static_cast<T>(buf[static_cast<size_t>(c) * plane + px]);
    }

    const MatX<T>* in = &ws.a0;
    for (int li = 0; li < 3; ++li) {
        const auto& l = geom_[li];
        im2col(*in, batch, l.in_h, l.k, l.stride, l.pad, l.out_h, ws.cols[li]);
        Eigen::Map<const RowMat<T>> w(params_.data() + offsets_[li].first, l.out_c,
                                      l.in_c * l.k * l.k);
        Eigen::Map<const Eigen::Vector<T, Eigen::Dynamic>> bias(
            params_.data() + offsets_[li].second, l.out_c);
        ws.act[li].noalias() = w * ws.cols[li];
        ws.act[li].colwise() += bias;
        ws.act[li] = ws.act[li].cwiseMax(T(0));
        in = &ws.act[li];
    }

    const auto& fc = geom_[3];
    const int spatial = fc.in_h * fc.in_h;
    const MatX<T>* features = &ws.act[2];
    if (spatial > 1) {
        ws.pooled.resize(fc.in_c, batch);
        for (int b = 0; b < batch; ++b)
            ws.pooled.col(b) =
                ws.act[2].middleCols(static_cast<Eigen::Index>(b) * spatial, spatial).rowwise().mean();
        features = &ws.pooled;
    }

    Eigen::Map<const RowMat<T>> w(params_.data() + offsets_[3].first, fc.out_c, fc.in_c);
    Eigen::Map<const Eigen::Vector<T, Eigen::Dynamic>> bias(params_.data() + offsets_[3].second,
                                                            fc.out_c);
    MatX<T> out = w * *features;
    out.colwise() += bias;
    return out;
}

template <typename T>
std::vector<T> ValueNetT<T>::forward(const ObservationStack& obs) const {
    Workspace ws;
    MatX<T> out = forward_train({&obs}, ws);
    return std::vector<T>(out.data(), out.data() + out.rows());
}

template <typename T>
void ValueNetT<T>::backward(const MatX<T>& dout, Workspace& ws, std::vector<T>& grad) const {
    const int batch = static_cast<int>(dout.cols());
    grad.assign(params_.size(), T(0));

    const auto& fc = geom_[3];
    const int spatial = fc.in_h * fc.in_h;
    const MatX<T>* features = spatial > 1 ? &ws.pooled : &ws.act[2];

    Eigen::Map<RowMat<T>> dw_fc(grad.data() + offsets_[3].first, fc.out_c, fc.in_c);
    Eigen::Map<Eigen::Vector<T, Eigen::Dynamic>> db_fc(grad.data() + offsets_[3].second, fc.out_c);
    dw_fc.noalias() = dout * features->transpose();
    db_fc = dout.rowwise().sum();

    Eigen::Map<const RowMat<T>> w_fc(params_.data() + offsets_[3].first, fc.out_c, fc.in_c);
    MatX<T> d_feat = w_fc.transpose() * dout;

    if (spatial > 1) {
        ws.d_act.resize(fc.in_c, static_cast<Eigen::Index>(batch) * spatial);
        const T inv = T(1) / static_cast<T>(spatial);
        for (int b = 0; b < batch; ++b)
            for (int s = 0; s < spatial; ++s)
                ws.d_act.col(static_cast<Eigen::Index>(b) * spatial + s) = d_feat.col(b) * inv;
    } else {
        ws.d_act = std::move(d_feat);
    }

    for (int li = 2; li >= 0; --li) {
        const auto& l = geom_[li];
        // rectifier mask from the cached post-activation
        ws.d_act = (ws.act[li].array() > T(0)).select(ws.d_act, T(0));

        Eigen::Map<RowMat<T>> dw(grad.data() + offsets_[li].first, l.out_c, l.in_c * l.k * l.k);
        Eigen::Map<Eigen::Vector<T, Eigen::Dynamic>> db(grad.data() + offsets_[li].second, l.out_c);
        dw.noalias() = ws.d_act * ws.cols[li].transpose();
        db = ws.d_act.rowwise().sum();

        if (li > 0) {
            Eigen::Map<const RowMat<T>> w(params_.data() + offsets_[li].first, l.out_c,
                                          l.in_c * l.k * l.k);
            ws.d_cols.noalias() = w.transpose() * ws.d_act;
            col2im(ws.d_cols, batch, l.in_h, l.k, l.stride, l.pad, l.out_h, l.in_c, ws.d_prev);
            ws.d_act = std::move(ws.d_prev);
        }
    }
}

template <typename T>
void AdamOpt<T>::step(std::vector<T>& params, const std::vector<T>& grad) {
    if (m.size() != params.size()) {
        m.assign(params.size(), 0.0);
        v.assign(params.size(), 0.0);
        t = 0;
    }
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t i = 0; i < params.size(); ++i) {
        double g = static_cast<double>(grad[i]);
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        double update = lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        params[i] = static_cast<T>(static_cast<double>(params[i]) - update);
    }
}

double grad_check(const ValueNetT<double>& net, const ObservationStack& obs, int action,
                  int subset, uint64_t seed, double h) {
    ValueNetT<double> probe = net;
    ValueNetT<double>::Workspace ws;

    MatX<double> out = probe.forward_train({&obs}, ws);
    MatX<double> dout = MatX<double>::Zero(out.rows(), 1);
    dout(action, 0) = 1.0;
    std::vector<double> analytic;
    probe.backward(dout, ws, analytic);

    RngStream rng(seed);
    double max_err = 0.0;
    for (int s = 0; s < subset; ++s) {
        size_t i = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(probe.num_params()) - 1));
        double saved = probe.params()[i];
        probe.params()[i] = saved + h;
        double qp = probe.forward(obs)[action];
        probe.params()[i] = saved - h;
        double qm = probe.forward(obs)[action];
        probe.params()[i] = saved;
        double numeric = (qp - qm) / (2.0 * h);
        // relative to the larger magnitude, floored so a dead path is not 0/0
        double err = std::abs(analytic[i] - numeric) /
                     std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-4);
        max_err = std::max(max_err, err);
    }
    return max_err;
}

namespace {

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void save_checkpoint(const ValueNet& net, const std::string& path, const std::string& rng_state) {
    std::string out = "AVQN";
    put_u32(out, 1);  // format version
    put_u32(out, static_cast<uint32_t>(net.spec().input_channels));
    put_u32(out, static_cast<uint32_t>(net.spec().grid_n));
    put_u32(out, static_cast<uint32_t>(net.spec().num_actions));
    put_u32(out, static_cast<uint32_t>(net.spec().hidden_channels));
    put_u32(out, static_cast<uint32_t>(rng_state.size()));
    out += rng_state;
    put_u32(out, static_cast<uint32_t>(net.num_params()));
    for (float p : net.params()) put_u32(out, std::bit_cast<uint32_t>(p));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string_view(magic, 4) != "AVQN") throw IoError("bad checkpoint magic: " + path);
    uint32_t version = get_u32(f);
    if (version != 1) throw IoError("unsupported checkpoint version");
    Checkpoint ck;
    ck.spec.input_channels = static_cast<int>(get_u32(f));
    ck.spec.grid_n = static_cast<int>(get_u32(f));
    ck.spec.num_actions = static_cast<int>(get_u32(f));
    ck.spec.hidden_channels = static_cast<int>(get_u32(f));
    uint32_t rng_len = get_u32(f);
    ck.rng_state.resize(rng_len);
    f.read(ck.rng_state.data(), rng_len);
    uint32_t count = get_u32(f);
    ck.params.resize(count);
    for (uint32_t i = 0; i < count; ++i) ck.params[i] = std::bit_cast<float>(get_u32(f));
    if (!f) throw IoError("truncated checkpoint: " + path);
    return ck;
}

ValueNet net_from_checkpoint(const Checkpoint& ck) {
    ValueNet net(ck.spec, 0);
    if (net.num_params() != ck.params.size())
        throw IoError("checkpoint parameter count does not match its layer spec");
    net.params() = ck.params;
    return net;
}

template class ValueNetT<float>;
template class ValueNetT<double>;
template struct AdamOpt<float>;
template struct AdamOpt<double>;

}  // namespace auvsim
