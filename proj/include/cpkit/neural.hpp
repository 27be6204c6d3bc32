#ifndef CPKIT_NEURAL_HPP
#define CPKIT_NEURAL_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cpkit/errors.hpp"
#include "cpkit/matrix.hpp"
#include "cpkit/rng.hpp"

namespace cpkit {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec sigmoid(const Vec& x) {
    Vec y = x;
    for (double& v : y.v) v = sigmoid(v);
    return y;
}

inline Vec tanh_vec(const Vec& x) {
    Vec y = x;
    for (double& v : y.v) v = std::tanh(v);
    return y;
}

// Numerically stable softmax (max subtracted before exponentiation).
inline Vec softmax(const Vec& x) {
    Vec y = x;
    double mx = y[0];
    for (double v : y.v) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : y.v) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : y.v) v /= sum;
    return y;
}

enum class Act : int { Linear = 0, Tanh = 1, Sigmoid = 2, Softmax = 3 };

inline Vec apply_act(Act a, const Vec& z) {
    switch (a) {
        case Act::Tanh: return tanh_vec(z);
        case Act::Sigmoid: return sigmoid(z);
        case Act::Softmax: return softmax(z);
        default: return z;
    }
}

// dL/dz given dL/dy and the activation output y.
inline Vec act_backward(Act a, const Vec& y, const Vec& dy) {
    Vec dz = dy;
    switch (a) {
        case Act::Tanh:
            for (int i = 0; i < y.rows; ++i) dz[i] *= 1.0 - y[i] * y[i];
            break;
        case Act::Sigmoid:
            for (int i = 0; i < y.rows; ++i) dz[i] *= y[i] * (1.0 - y[i]);
            break;
        case Act::Softmax: {
            double s = 0.0;
            for (int i = 0; i < y.rows; ++i) s += y[i] * dy[i];
            for (int i = 0; i < y.rows; ++i) dz[i] = y[i] * (dy[i] - s);
            break;
        }
        default: break;
    }
    return dz;
}

// ---- initialization ------------------------------------------------------

inline void glorot_init(Mat& w, Rng& rng) {
    const double bound = std::sqrt(6.0 / (w.rows + w.cols));
    for (double& x : w.v) x = uniform(rng, -bound, bound);
}

// ---- dense stack ----------------------------------------------------------

struct DenseLayer {
    Mat W;
    Vec b;
    Act act = Act::Tanh;
};

struct DenseStack {
    std::vector<DenseLayer> layers;

    int in_dim() const { return layers.empty() ? 0 : layers.front().W.cols; }
    int out_dim() const { return layers.empty() ? 0 : layers.back().W.rows; }
};

inline DenseStack make_dense(int in_dim, const std::vector<std::pair<int, Act>>& widths,
                             Rng& rng) {
    DenseStack s;
    int d = in_dim;
    for (auto [w, act] : widths) {
        DenseLayer layer;
        layer.W = Mat(w, d);
        layer.b = Vec(w, 1);
        layer.act = act;
        glorot_init(layer.W, rng);
        s.layers.push_back(std::move(layer));
        d = w;
    }
    return s;
}

struct DenseCache {
    std::vector<Vec> inputs;  // per layer
    std::vector<Vec> outputs; // per layer (post-activation)
};

inline Vec dense_forward(const DenseStack& s, const Vec& x, DenseCache* cache = nullptr) {
    Vec cur = x;
    for (const DenseLayer& layer : s.layers) {
        check_shape(layer.W.cols == cur.rows, "dense_forward: fan-in mismatch");
        if (cache) cache->inputs.push_back(cur);
        Vec z = matvec(layer.W, cur);
        for (int i = 0; i < z.rows; ++i) z[i] += layer.b[i];
        cur = apply_act(layer.act, z);
        if (cache) cache->outputs.push_back(cur);
    }
    return cur;
}

struct DenseGrads {
    std::vector<Mat> dW;
    std::vector<Vec> db;
    Vec dx;
};

inline DenseGrads make_grads(const DenseStack& s) {
    DenseGrads g;
    for (const DenseLayer& layer : s.layers) {
        g.dW.emplace_back(layer.W.rows, layer.W.cols);
        g.db.emplace_back(layer.b.rows, 1);
    }
    return g;
}

// Accumulates into g; dy is dL/d(output).
inline void dense_backward(const DenseStack& s, const DenseCache& cache, const Vec& dy,
                           DenseGrads& g) {
    Vec cur = dy;
    for (int li = static_cast<int>(s.layers.size()) - 1; li >= 0; --li) {
        const DenseLayer& layer = s.layers[static_cast<std::size_t>(li)];
        const Vec& y = cache.outputs[static_cast<std::size_t>(li)];
        const Vec& x = cache.inputs[static_cast<std::size_t>(li)];
        Vec dz = act_backward(layer.act, y, cur);
        outer_add(g.dW[static_cast<std::size_t>(li)], dz, x);
        axpy(1.0, dz, g.db[static_cast<std::size_t>(li)]);
        Vec dx(x.rows, 1);
        matvec_t_add(layer.W, dz, dx);
        cur = std::move(dx);
    }
    g.dx = std::move(cur);
}

// ---- LSTM ------------------------------------------------------------------

struct LstmParams {
    int in = 0, hid = 0;
    Mat Wi, Ui, Wf, Uf, Wo, Uo, Wa, Ua; // input/forget/output gates + candidate
    Vec bi, bf, bo, ba;
};

inline LstmParams make_lstm(int in_dim, int hid_dim, Rng& rng) {
    LstmParams p;
    p.in = in_dim;
    p.hid = hid_dim;
    auto mk = [&](Mat& w, int r, int c) {
        w = Mat(r, c);
        glorot_init(w, rng);
    };
    mk(p.Wi, hid_dim, in_dim);
    mk(p.Ui, hid_dim, hid_dim);
    mk(p.Wf, hid_dim, in_dim);
    mk(p.Uf, hid_dim, hid_dim);
    mk(p.Wo, hid_dim, in_dim);
    mk(p.Uo, hid_dim, hid_dim);
    mk(p.Wa, hid_dim, in_dim);
    mk(p.Ua, hid_dim, hid_dim);
    p.bi = Vec(hid_dim, 1);
    p.bf = Vec(hid_dim, 1);
    p.bo = Vec(hid_dim, 1);
    p.ba = Vec(hid_dim, 1);
    p.bf.fill(1.0); // forget gate opens at init
    return p;
}

struct LstmCache {
    // per-step values; index t in [0, N)
    std::vector<Vec> x, i, f, o, g, c, h;
};

// h_0 = c_0 = 0. seq is N x in.
inline void lstm_forward(const LstmParams& p, const Mat& seq, LstmCache& cache) {
    check_shape(seq.cols == p.in && seq.rows >= 1, "lstm_forward: bad sequence shape");
    const int n = seq.rows;
    cache = LstmCache{};
    Vec h_prev(p.hid, 1), c_prev(p.hid, 1);
    for (int t = 0; t < n; ++t) {
        Vec x(p.in, 1);
        for (int j = 0; j < p.in; ++j) x[j] = seq(t, j);

        auto gate = [&](const Mat& W, const Mat& U, const Vec& b) {
            Vec z = matvec(W, x);
            matvec_add(U, h_prev, z);
            for (int j = 0; j < p.hid; ++j) z[j] += b[j];
            return z;
        };
        Vec i = sigmoid(gate(p.Wi, p.Ui, p.bi));
        Vec f = sigmoid(gate(p.Wf, p.Uf, p.bf));
        Vec o = sigmoid(gate(p.Wo, p.Uo, p.bo));
        Vec g = tanh_vec(gate(p.Wa, p.Ua, p.ba));
        Vec c(p.hid, 1);
        for (int j = 0; j < p.hid; ++j) c[j] = f[j] * c_prev[j] + i[j] * g[j];
        Vec h(p.hid, 1);
        for (int j = 0; j < p.hid; ++j) h[j] = o[j] * std::tanh(c[j]);

        cache.x.push_back(std::move(x));
        cache.i.push_back(std::move(i));
        cache.f.push_back(std::move(f));
        cache.o.push_back(std::move(o));
        cache.g.push_back(std::move(g));
        cache.c.push_back(c);
        cache.h.push_back(h);
        h_prev = std::move(h);
        c_prev = std::move(c);
    }
}

struct LstmGrads {
    Mat dWi, dUi, dWf, dUf, dWo, dUo, dWa, dUa;
    Vec dbi, dbf, dbo, dba;
    std::vector<Vec> dx; // per-step input gradient
};

inline LstmGrads make_grads(const LstmParams& p) {
    LstmGrads g;
    g.dWi = Mat(p.hid, p.in);
    g.dUi = Mat(p.hid, p.hid);
    g.dWf = Mat(p.hid, p.in);
    g.dUf = Mat(p.hid, p.hid);
    g.dWo = Mat(p.hid, p.in);
    g.dUo = Mat(p.hid, p.hid);
    g.dWa = Mat(p.hid, p.in);
    g.dUa = Mat(p.hid, p.hid);
    g.dbi = Vec(p.hid, 1);
    g.dbf = Vec(p.hid, 1);
    g.dbo = Vec(p.hid, 1);
    g.dba = Vec(p.hid, 1);
    return g;
}

// Backprop through time. dh[t] is dL/dh_t from the consumer side; grads
// accumulate into g.
inline void lstm_backward(const LstmParams& p, const LstmCache& cache,
                          const std::vector<Vec>& dh, LstmGrads& g, bool want_dx = false) {
    const int n = static_cast<int>(cache.h.size());
    check_shape(static_cast<int>(dh.size()) == n, "lstm_backward: dh length mismatch");
    if (want_dx) g.dx.assign(static_cast<std::size_t>(n), Vec(p.in, 1));

    Vec dh_next(p.hid, 1), dc_next(p.hid, 1);
    for (int t = n - 1; t >= 0; --t) {
        const Vec& i = cache.i[static_cast<std::size_t>(t)];
        const Vec& f = cache.f[static_cast<std::size_t>(t)];
        const Vec& o = cache.o[static_cast<std::size_t>(t)];
        const Vec& gc = cache.g[static_cast<std::size_t>(t)];
        const Vec& c = cache.c[static_cast<std::size_t>(t)];
        const Vec& x = cache.x[static_cast<std::size_t>(t)];
        const Vec c_prev = t > 0 ? cache.c[static_cast<std::size_t>(t - 1)] : Vec(p.hid, 1);
        const Vec h_prev = t > 0 ? cache.h[static_cast<std::size_t>(t - 1)] : Vec(p.hid, 1);

        Vec dht = dh[static_cast<std::size_t>(t)];
        axpy(1.0, dh_next, dht);

        Vec tc(p.hid, 1);
        for (int j = 0; j < p.hid; ++j) tc[j] = std::tanh(c[j]);

        Vec dc = dc_next;
        Vec dzo(p.hid, 1), dzi(p.hid, 1), dzf(p.hid, 1), dzg(p.hid, 1);
        for (int j = 0; j < p.hid; ++j) {
            dzo[j] = dht[j] * tc[j] * o[j] * (1.0 - o[j]);
            dc[j] += dht[j] * o[j] * (1.0 - tc[j] * tc[j]);
            dzi[j] = dc[j] * gc[j] * i[j] * (1.0 - i[j]);
            dzf[j] = dc[j] * c_prev[j] * f[j] * (1.0 - f[j]);
            dzg[j] = dc[j] * i[j] * (1.0 - gc[j] * gc[j]);
        }

        outer_add(g.dWi, dzi, x);
        outer_add(g.dUi, dzi, h_prev);
        axpy(1.0, dzi, g.dbi);
        outer_add(g.dWf, dzf, x);
        outer_add(g.dUf, dzf, h_prev);
        axpy(1.0, dzf, g.dbf);
        outer_add(g.dWo, dzo, x);
        outer_add(g.dUo, dzo, h_prev);
        axpy(1.0, dzo, g.dbo);
        outer_add(g.dWa, dzg, x);
        outer_add(g.dUa, dzg, h_prev);
        axpy(1.0, dzg, g.dba);

        Vec dhp(p.hid, 1);
        matvec_t_add(p.Ui, dzi, dhp);
        matvec_t_add(p.Uf, dzf, dhp);
        matvec_t_add(p.Uo, dzo, dhp);
        matvec_t_add(p.Ua, dzg, dhp);
        dh_next = std::move(dhp);

        for (int j = 0; j < p.hid; ++j) dc_next[j] = dc[j] * f[j];

        if (want_dx) {
            Vec& dx = g.dx[static_cast<std::size_t>(t)];
            matvec_t_add(p.Wi, dzi, dx);
            matvec_t_add(p.Wf, dzf, dx);
            matvec_t_add(p.Wo, dzo, dx);
            matvec_t_add(p.Wa, dzg, dx);
        }
    }
}

// ---- attention pooling -----------------------------------------------------

struct AttentionParams {
    Vec w; // 1 x hid taken as a row; score_t = tanh(w . h_t) + b
    Vec b; // scalar; shifts every score equally, so softmax cancels it
};

inline AttentionParams make_attention(int hid, Rng& rng) {
    AttentionParams p;
    p.w = Vec(hid, 1);
    p.b = Vec(1, 1);
    const double bound = std::sqrt(6.0 / (hid + 1));
    for (double& x : p.w.v) x = uniform(rng, -bound, bound);
    return p;
}

struct AttentionCache {
    std::vector<double> u;     // pre-tanh scores
    std::vector<double> alpha; // softmax weights
};

inline Vec attention_pool(const AttentionParams& p, const std::vector<Vec>& hs,
                          AttentionCache* cache = nullptr) {
    check_shape(!hs.empty(), "attention_pool: empty sequence");
    const int n = static_cast<int>(hs.size());
    std::vector<double> u(static_cast<std::size_t>(n));
    Vec scores(n, 1);
    for (int t = 0; t < n; ++t) {
        u[static_cast<std::size_t>(t)] = dot(p.w, hs[static_cast<std::size_t>(t)]);
        scores[t] = std::tanh(u[static_cast<std::size_t>(t)]) + p.b[0];
    }
    Vec alpha = softmax(scores);
    Vec pooled(hs[0].rows, 1);
    for (int t = 0; t < n; ++t) axpy(alpha[t], hs[static_cast<std::size_t>(t)], pooled);
    if (cache) {
        cache->u = std::move(u);
        cache->alpha.assign(alpha.v.begin(), alpha.v.end());
    }
    return pooled;
}

struct AttentionGrads {
    Vec dw;
    Vec db;
    std::vector<Vec> dh;
};

inline void attention_backward(const AttentionParams& p, const std::vector<Vec>& hs,
                               const AttentionCache& cache, const Vec& dpooled,
                               AttentionGrads& g) {
    const int n = static_cast<int>(hs.size());
    if (g.dw.rows == 0) g.dw = Vec(p.w.rows, 1);
    if (g.db.rows == 0) g.db = Vec(1, 1);
    g.dh.assign(static_cast<std::size_t>(n), Vec(hs[0].rows, 1));

    std::vector<double> dalpha(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        dalpha[static_cast<std::size_t>(t)] = dot(hs[static_cast<std::size_t>(t)], dpooled);
        axpy(cache.alpha[static_cast<std::size_t>(t)], dpooled, g.dh[static_cast<std::size_t>(t)]);
    }
    double s = 0.0;
    for (int t = 0; t < n; ++t)
        s += cache.alpha[static_cast<std::size_t>(t)] * dalpha[static_cast<std::size_t>(t)];
    for (int t = 0; t < n; ++t) {
        const double ds = cache.alpha[static_cast<std::size_t>(t)] *
                          (dalpha[static_cast<std::size_t>(t)] - s);
        g.db[0] += ds;
        const double th = std::tanh(cache.u[static_cast<std::size_t>(t)]);
        const double du = ds * (1.0 - th * th);
        axpy(du, hs[static_cast<std::size_t>(t)], g.dw);
        axpy(du, p.w, g.dh[static_cast<std::size_t>(t)]);
    }
}

// ---- Adam -------------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    std::int64_t step = 0;
    std::vector<Mat> m, v;

    void init(const std::vector<Mat*>& params) {
        step = 0;
        m.clear();
        v.clear();
        for (const Mat* p : params) {
            m.emplace_back(p->rows, p->cols);
            v.emplace_back(p->rows, p->cols);
        }
    }
};

inline void adam_step(AdamState& st, const std::vector<Mat*>& params,
                      const std::vector<const Mat*>& grads) {
    check_shape(params.size() == grads.size() && params.size() == st.m.size(),
                "adam_step: parameter/gradient mismatch");
    ++st.step;
    const double bc1 = 1.0 - std::pow(st.cfg.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(st.cfg.beta2, static_cast<double>(st.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Mat& p = *params[k];
        const Mat& g = *grads[k];
        check_shape(p.same_shape(g), "adam_step: grad shape mismatch");
        Mat& m = st.m[k];
        Mat& v = st.v[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = st.cfg.beta1 * m[i] + (1.0 - st.cfg.beta1) * g[i];
            v[i] = st.cfg.beta2 * v[i] + (1.0 - st.cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= st.cfg.lr * mhat / (std::sqrt(vhat) + st.cfg.eps);
        }
    }
}

// ---- named tensors & checkpoints --------------------------------------------

using NamedTensors = std::vector<std::pair<std::string, Mat*>>;

inline NamedTensors tensors(LstmParams& p, const std::string& prefix) {
    return {{prefix + ".Wi", &p.Wi}, {prefix + ".Ui", &p.Ui}, {prefix + ".bi", &p.bi},
            {prefix + ".Wf", &p.Wf}, {prefix + ".Uf", &p.Uf}, {prefix + ".bf", &p.bf},
            {prefix + ".Wo", &p.Wo}, {prefix + ".Uo", &p.Uo}, {prefix + ".bo", &p.bo},
            {prefix + ".Wa", &p.Wa}, {prefix + ".Ua", &p.Ua}, {prefix + ".ba", &p.ba}};
}

inline NamedTensors tensors(LstmGrads& g) {
    return {{"Wi", &g.dWi}, {"Ui", &g.dUi}, {"bi", &g.dbi}, {"Wf", &g.dWf},
            {"Uf", &g.dUf}, {"bf", &g.dbf}, {"Wo", &g.dWo}, {"Uo", &g.dUo},
            {"bo", &g.dbo}, {"Wa", &g.dWa}, {"Ua", &g.dUa}, {"ba", &g.dba}};
}

inline NamedTensors tensors(AttentionParams& p, const std::string& prefix) {
    return {{prefix + ".w", &p.w}, {prefix + ".b", &p.b}};
}

inline NamedTensors tensors(DenseStack& s, const std::string& prefix) {
    NamedTensors out;
    for (std::size_t i = 0; i < s.layers.size(); ++i) {
        out.emplace_back(prefix + ".W" + std::to_string(i), &s.layers[i].W);
        out.emplace_back(prefix + ".b" + std::to_string(i), &s.layers[i].b);
    }
    return out;
}

// Textual checkpoint with hexfloat entries; read(write(m)) is bit-exact.
inline void write_checkpoint(std::ostream& out, const NamedTensors& ts) {
    out << "cpkit-ckpt v1 " << ts.size() << '\n';
    out << std::hexfloat;
    for (const auto& [name, m] : ts) {
        out << name << ' ' << m->rows << ' ' << m->cols;
        for (double x : m->v) out << ' ' << x;
        out << '\n';
    }
}

inline void write_checkpoint(const std::string& path, const NamedTensors& ts) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    write_checkpoint(out, ts);
}

inline void read_checkpoint(std::istream& in, const NamedTensors& ts) {
    std::string magic, version;
    std::size_t count = 0;
    if (!(in >> magic >> version >> count) || magic != "cpkit-ckpt" || version != "v1")
        throw ParseError("bad checkpoint header");
    if (count != ts.size())
        throw ParseError("checkpoint tensor count mismatch");
    for (const auto& [name, m] : ts) {
        std::string got;
        int rows = 0, cols = 0;
        if (!(in >> got >> rows >> cols)) throw ParseError("truncated checkpoint");
        if (got != name) throw ParseError("checkpoint tensor order mismatch: " + got);
        if (rows != m->rows || cols != m->cols)
            throw ParseError("checkpoint tensor shape mismatch: " + name);
        for (double& x : m->v) {
            std::string tok;
            if (!(in >> tok)) throw ParseError("truncated checkpoint tensor: " + name);
            x = std::strtod(tok.c_str(), nullptr);
        }
    }
}

inline void read_checkpoint(const std::string& path, const NamedTensors& ts) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open for reading: " + path);
    read_checkpoint(in, ts);
}

inline std::vector<Mat*> tensor_ptrs(const NamedTensors& ts) {
    std::vector<Mat*> out;
    out.reserve(ts.size());
    for (const auto& [name, m] : ts) out.push_back(m);
    return out;
}

} // namespace cpkit

#endif
