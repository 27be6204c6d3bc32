#ifndef CPKIT_PREDICTOR_HPP
#define CPKIT_PREDICTOR_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "cpkit/errors.hpp"
#include "cpkit/features.hpp"
#include "cpkit/neural.hpp"

namespace cpkit {

// ---- TW-LSTM burst model ----------------------------------------------------

struct TwLstmModel {
    bool use_ctype = true;  // ablation: drop the content-type one-hot
    bool use_priori = true; // ablation: drop the chained prior input
    LstmParams lstm;        // over the 3-attribute micro sequence
    AttentionParams attention;
    DenseStack fc; // 32, 16, then 1 sigmoid
    Vec macro_mean, macro_std;

    int macro_dim() const { return use_ctype ? MacroFeatures::kDim : MacroFeatures::kDim - 3; }
};

inline TwLstmModel make_twlstm(Rng& rng, bool use_ctype = true, bool use_priori = true,
                               int hidden = 64) {
    TwLstmModel m;
    m.use_ctype = use_ctype;
    m.use_priori = use_priori;
    m.lstm = make_lstm(MicroSequence::kDim, hidden, rng);
    m.attention = make_attention(hidden, rng);
    const int in = m.macro_dim() + hidden + (use_priori ? 1 : 0);
    m.fc = make_dense(in, {{32, Act::Tanh}, {16, Act::Tanh}, {1, Act::Sigmoid}}, rng);
    m.macro_mean = Vec(m.macro_dim(), 1);
    m.macro_std = Vec(m.macro_dim(), 1);
    m.macro_std.fill(1.0);
    return m;
}

inline NamedTensors tensors(TwLstmModel& m) {
    NamedTensors ts = tensors(m.lstm, "lstm");
    for (auto& t : tensors(m.attention, "att")) ts.push_back(t);
    for (auto& t : tensors(m.fc, "fc")) ts.push_back(t);
    ts.emplace_back("macro_mean", &m.macro_mean);
    ts.emplace_back("macro_std", &m.macro_std);
    return ts;
}

namespace detail {

// Counts are compressed with log1p; level statistics stay raw.
inline Vec raw_macro(const MacroFeatures& mf, bool use_ctype) {
    Vec full = mf.to_vec();
    Vec x(use_ctype ? MacroFeatures::kDim : MacroFeatures::kDim - 3, 1);
    for (int i = 0; i < x.rows; ++i) x[i] = full[i];
    x[0] = std::log1p(x[0]);
    x[1] = std::log1p(x[1]);
    return x;
}

inline Mat micro_input(const MicroSequence& micro) {
    Mat a = micro.a;
    for (int t = 0; t < a.rows; ++t) {
        a(t, 0) = std::log1p(a(t, 0));
        a(t, 1) = std::log1p(a(t, 1));
    }
    return a;
}

} // namespace detail

struct TwLstmForward {
    LstmCache lstm;
    AttentionCache att;
    DenseCache fc;
    Vec macro; // standardized macro slice that entered the fc input
    double prior = 0.5;
    double p_hat = 0.5;
};

inline double predict_window(const TwLstmModel& m, const WindowObservation& obs, double prior,
                             TwLstmForward* cache = nullptr) {
    if (prior < 0.0 || prior > 1.0) throw ConfigError("prior must be in [0,1]");
    TwLstmForward local;
    TwLstmForward& fw = cache ? *cache : local;
    fw.prior = prior;

    const Mat micro = detail::micro_input(obs.micro);
    lstm_forward(m.lstm, micro, fw.lstm);
    const Vec pooled = attention_pool(m.attention, fw.lstm.h, &fw.att);

    Vec macro = detail::raw_macro(obs.macro, m.use_ctype);
    for (int i = 0; i < macro.rows; ++i)
        macro[i] = (macro[i] - m.macro_mean[i]) / m.macro_std[i];
    fw.macro = macro;

    Vec r(m.fc.in_dim(), 1);
    int at = 0;
    for (int i = 0; i < macro.rows; ++i) r[at++] = macro[i];
    for (int i = 0; i < pooled.rows; ++i) r[at++] = pooled[i];
    if (m.use_priori) r[at++] = prior;

    const Vec out = dense_forward(m.fc, r, &fw.fc);
    fw.p_hat = out[0];
    return out[0];
}

struct RollingVerdict {
    int burst_window = -1; // 1-based; -1 when never predicted to burst
    std::vector<double> probs;
    bool has_geo = false;
    GeoDistribution predicted_geo;
};

// Chains each window's prediction into the next as the prior (0.5 to start)
// and stops at the first window whose probability reaches the threshold.
inline RollingVerdict rolling_predict(const TwLstmModel& m,
                                      const std::vector<WindowObservation>& windows,
                                      double threshold = 0.5) {
    if (windows.empty()) throw ConfigError("rolling_predict: no windows");
    RollingVerdict v;
    double prior = 0.5;
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const double p = predict_window(m, windows[k], prior);
        v.probs.push_back(p);
        if (p >= threshold) {
            v.burst_window = static_cast<int>(k) + 1;
            break;
        }
        prior = p;
    }
    return v;
}

// ---- burst training ----------------------------------------------------------

struct BurstSample {
    std::vector<WindowObservation> windows; // obs 1..Q in order
    bool explosive = false;
};

struct TrainConfig {
    std::uint64_t seed = 0;
    int epochs = 6;
    double lr = 2e-3;
    int hidden = 64;
    bool use_ctype = true;
    bool use_priori = true;
};

struct TwLstmGrads {
    LstmGrads lstm;
    AttentionGrads att;
    DenseGrads fc;
};

namespace detail {

inline std::vector<const Mat*> const_ptrs(const std::vector<Mat*>& ps) {
    return {ps.begin(), ps.end()};
}

inline NamedTensors grad_tensors(TwLstmGrads& g) {
    NamedTensors ts = tensors(g.lstm);
    ts.emplace_back("att.w", &g.att.dw);
    ts.emplace_back("att.b", &g.att.db);
    for (std::size_t i = 0; i < g.fc.dW.size(); ++i) {
        ts.emplace_back("fc.W", &g.fc.dW[i]);
        ts.emplace_back("fc.b", &g.fc.db[i]);
    }
    return ts;
}

// One backward pass; returns parameter gradients for one sample.
inline void twlstm_backward(const TwLstmModel& m, const TwLstmForward& fw, double dloss_dp,
                            TwLstmGrads& g) {
    Vec dy(1, 1);
    dy[0] = dloss_dp;
    dense_backward(m.fc, fw.fc, dy, g.fc);

    const int md = m.macro_dim();
    Vec dpooled(m.lstm.hid, 1);
    for (int i = 0; i < m.lstm.hid; ++i) dpooled[i] = g.fc.dx[md + i];
    attention_backward(m.attention, fw.lstm.h, fw.att, dpooled, g.att);
    lstm_backward(m.lstm, fw.lstm, g.att.dh, g.lstm);
}

inline void fit_standardization(TwLstmModel& m, const std::vector<BurstSample>& data) {
    const int d = m.macro_dim();
    Vec sum(d, 1), sq(d, 1);
    std::int64_t n = 0;
    for (const BurstSample& s : data)
        for (const WindowObservation& obs : s.windows) {
            const Vec x = raw_macro(obs.macro, m.use_ctype);
            for (int i = 0; i < d; ++i) {
                sum[i] += x[i];
                sq[i] += x[i] * x[i];
            }
            ++n;
        }
    for (int i = 0; i < d; ++i) {
        const double mean = sum[i] / static_cast<double>(n);
        const double var = sq[i] / static_cast<double>(n) - mean * mean;
        m.macro_mean[i] = mean;
        m.macro_std[i] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
}

} // namespace detail

// Per-sample Adam on weighted binary cross-entropy, with the prior chained
// through a cascade's windows during training exactly as at inference time.
inline TwLstmModel train_burst(const std::vector<BurstSample>& data, const TrainConfig& cfg) {
    if (data.empty()) throw ConfigError("train_burst: empty training set");
    std::int64_t pos = 0;
    for (const BurstSample& s : data) pos += s.explosive ? 1 : 0;
    if (pos == 0 || pos == static_cast<std::int64_t>(data.size()))
        throw ConfigError("train_burst: degenerate single-class training set");

    Rng rng(derive_seed(cfg.seed, 0x62757273ULL));
    TwLstmModel m = make_twlstm(rng, cfg.use_ctype, cfg.use_priori, cfg.hidden);
    detail::fit_standardization(m, data);

    // inverse-prior weight on the minority positive class
    const double pos_w = static_cast<double>(data.size()) / (2.0 * static_cast<double>(pos));
    const double neg_w =
        static_cast<double>(data.size()) / (2.0 * static_cast<double>(data.size() - pos));

    NamedTensors params = tensors(m);
    std::vector<Mat*> pptr = tensor_ptrs(params);
    pptr.resize(pptr.size() - 2); // normalization constants are not trained
    AdamState adam;
    adam.cfg.lr = cfg.lr;
    adam.init(pptr);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // cosine decay tames the noise of the final per-sample iterates
        adam.cfg.lr = cfg.lr * 0.5 *
                      (1.0 + std::cos(std::numbers::pi * epoch / std::max(1, cfg.epochs)));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const BurstSample& s = data[idx];
            const double y = s.explosive ? 1.0 : 0.0;
            const double w = s.explosive ? pos_w : neg_w;
            double prior = 0.5;
            for (const WindowObservation& obs : s.windows) {
                TwLstmForward fw;
                const double p = predict_window(m, obs, prior, &fw);
                // d/dp of w * BCE(p, y), clamped away from the rails
                const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
                const double dloss = w * (pc - y) / (pc * (1.0 - pc));

                TwLstmGrads g;
                g.lstm = make_grads(m.lstm);
                g.fc = make_grads(m.fc);
                detail::twlstm_backward(m, fw, dloss, g);

                NamedTensors gts = detail::grad_tensors(g);
                std::vector<Mat*> gptr = tensor_ptrs(gts);
                adam_step(adam, pptr, detail::const_ptrs(gptr));
                prior = p;
            }
        }
    }
    return m;
}

// Fraction of samples classified correctly by the window-k probability under
// prior chaining through windows 1..k.
inline double burst_accuracy(const TwLstmModel& m, const std::vector<BurstSample>& data, int k,
                             double threshold = 0.5) {
    std::int64_t correct = 0;
    for (const BurstSample& s : data) {
        double prior = 0.5, p = 0.5;
        for (int w = 0; w < k && w < static_cast<int>(s.windows.size()); ++w) {
            p = predict_window(m, s.windows[static_cast<std::size_t>(w)], prior);
            prior = p;
        }
        const bool predicted = p >= threshold;
        if (predicted == s.explosive) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

// ---- geo-distribution predictor ----------------------------------------------

struct GeoPredictor {
    int m_regions = 0;
    LstmParams lstm; // over the N x M cumulative-proportion sequence
    AttentionParams attention;
    DenseStack fc; // hidden tanh, then M-way softmax
};

inline GeoPredictor make_geo_predictor(int m_regions, Rng& rng, int hidden = 32) {
    GeoPredictor g;
    g.m_regions = m_regions;
    g.lstm = make_lstm(m_regions, hidden, rng);
    g.attention = make_attention(hidden, rng);
    g.fc = make_dense(hidden, {{32, Act::Tanh}, {m_regions, Act::Softmax}}, rng);
    return g;
}

inline NamedTensors tensors(GeoPredictor& g) {
    NamedTensors ts = tensors(g.lstm, "lstm");
    for (auto& t : tensors(g.attention, "att")) ts.push_back(t);
    for (auto& t : tensors(g.fc, "fc")) ts.push_back(t);
    return ts;
}

inline GeoDistribution predict_geo(const GeoPredictor& g, const Mat& geo_seq) {
    check_shape(geo_seq.cols == g.m_regions, "predict_geo: region count mismatch");
    LstmCache lc;
    lstm_forward(g.lstm, geo_seq, lc);
    const Vec pooled = attention_pool(g.attention, lc.h);
    const Vec out = dense_forward(g.fc, pooled);
    GeoDistribution d;
    d.x.assign(out.v.begin(), out.v.end());
    return d;
}

// Mean square error over regions.
inline double geo_mse(const GeoDistribution& x, const GeoDistribution& truth) {
    if (x.x.size() != truth.x.size()) throw ShapeError("geo_mse: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.x.size(); ++i)
        s += (x.x[i] - truth.x[i]) * (x.x[i] - truth.x[i]);
    return s / static_cast<double>(x.x.size());
}

struct GeoSample {
    Mat seq; // N x M cumulative proportions at the declared burst window
    GeoDistribution final_geo;
};

inline GeoPredictor train_geo(const std::vector<GeoSample>& data, const TrainConfig& cfg,
                              int m_regions) {
    if (data.empty()) throw ConfigError("train_geo: empty training set");
    Rng rng(derive_seed(cfg.seed, 0x67656fULL));
    GeoPredictor g = make_geo_predictor(m_regions, rng, cfg.hidden);

    NamedTensors params = tensors(g);
    std::vector<Mat*> pptr = tensor_ptrs(params);
    AdamState adam;
    adam.cfg.lr = cfg.lr;
    adam.init(pptr);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const GeoSample& s = data[idx];
            LstmCache lc;
            lstm_forward(g.lstm, s.seq, lc);
            AttentionCache ac;
            const Vec pooled = attention_pool(g.attention, lc.h, &ac);
            DenseCache dc;
            const Vec out = dense_forward(g.fc, pooled, &dc);

            Vec dy(m_regions, 1);
            for (int i = 0; i < m_regions; ++i)
                dy[i] = 2.0 * (out[i] - s.final_geo.x[static_cast<std::size_t>(i)]) /
                        static_cast<double>(m_regions);

            DenseGrads fg = make_grads(g.fc);
            dense_backward(g.fc, dc, dy, fg);
            AttentionGrads ag;
            attention_backward(g.attention, lc.h, ac, fg.dx, ag);
            LstmGrads lg = make_grads(g.lstm);
            lstm_backward(g.lstm, lc, ag.dh, lg);

            NamedTensors gts = tensors(lg);
            gts.emplace_back("att.w", &ag.dw);
            gts.emplace_back("att.b", &ag.db);
            for (std::size_t i = 0; i < fg.dW.size(); ++i) {
                gts.emplace_back("fc.W", &fg.dW[i]);
                gts.emplace_back("fc.b", &fg.db[i]);
            }
            std::vector<Mat*> gptr = tensor_ptrs(gts);
            adam_step(adam, pptr, detail::const_ptrs(gptr));
        }
    }
    return g;
}

inline double mean_geo_mse(const GeoPredictor& g, const std::vector<GeoSample>& data) {
    double s = 0.0;
    for (const GeoSample& d : data) s += geo_mse(predict_geo(g, d.seq), d.final_geo);
    return s / static_cast<double>(data.size());
}

// ---- model files -------------------------------------------------------------

inline void save_twlstm(const std::string& path, TwLstmModel& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "twlstm v1 " << m.use_ctype << ' ' << m.use_priori << ' ' << m.lstm.hid << '\n';
    write_checkpoint(out, tensors(m));
}

inline TwLstmModel load_twlstm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open for reading: " + path);
    std::string magic, version;
    int use_ctype = 0, use_priori = 0, hid = 0;
    if (!(in >> magic >> version >> use_ctype >> use_priori >> hid) || magic != "twlstm")
        throw ParseError("bad model header: " + path);
    Rng rng(0);
    TwLstmModel m = make_twlstm(rng, use_ctype != 0, use_priori != 0, hid);
    read_checkpoint(in, tensors(m));
    return m;
}

inline void save_geo(const std::string& path, GeoPredictor& g) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "geo v1 " << g.m_regions << ' ' << g.lstm.hid << '\n';
    write_checkpoint(out, tensors(g));
}

inline GeoPredictor load_geo(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open for reading: " + path);
    std::string magic, version;
    int m = 0, hid = 0;
    if (!(in >> magic >> version >> m >> hid) || magic != "geo")
        throw ParseError("bad model header: " + path);
    Rng rng(0);
    GeoPredictor g = make_geo_predictor(m, rng, hid);
    read_checkpoint(in, tensors(g));
    return g;
}

} // namespace cpkit

#endif
