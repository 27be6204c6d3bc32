#ifndef CPKIT_BASELINES_HPP
#define CPKIT_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cpkit/errors.hpp"
#include "cpkit/features.hpp"
#include "cpkit/neural.hpp"
#include "cpkit/predictor.hpp"

namespace cpkit {

// ---- Holt's linear (double) exponential smoothing ------------------------------
// Level:    l_t = a*y_t + (1-a)(l_{t-1} + b_{t-1})
// Trend:    b_t = B*(l_t - l_{t-1}) + (1-B)*b_{t-1}
// Forecast: y_{T+h} = l_T + h*b_T
// No seasonal term: a cascade is a single-lifetime series.

struct HoltState {
    double level = 0.0;
    double trend = 0.0;
    double alpha = 0.5;
    double beta = 0.5;
};

inline double holt_forecast(const std::vector<double>& series, int h, double alpha, double beta) {
    if (series.size() < 2) throw ConfigError("holt_forecast: series length must be >= 2");
    if (alpha <= 0.0 || alpha > 1.0 || beta <= 0.0 || beta > 1.0)
        throw ConfigError("holt_forecast: smoothing constants must be in (0,1]");
    double level = series[0];
    double trend = series[1] - series[0];
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double prev = level;
        level = alpha * series[t] + (1.0 - alpha) * (level + trend);
        trend = beta * (level - prev) + (1.0 - beta) * trend;
    }
    return level + static_cast<double>(h) * trend;
}

// Grid search over {0.1,...,0.9}^2 on one-step-ahead training MSE.
inline HoltState fit_holt(const std::vector<std::vector<double>>& series_set) {
    HoltState best;
    double best_mse = std::numeric_limits<double>::infinity();
    for (int ai = 1; ai <= 9; ++ai)
        for (int bi = 1; bi <= 9; ++bi) {
            const double a = ai / 10.0, b = bi / 10.0;
            double se = 0.0;
            std::int64_t n = 0;
            for (const auto& y : series_set) {
                if (y.size() < 3) continue;
                double level = y[0], trend = y[1] - y[0];
                for (std::size_t t = 1; t < y.size(); ++t) {
                    if (t >= 2) {
                        const double pred = level + trend;
                        se += (pred - y[t]) * (pred - y[t]);
                        ++n;
                    }
                    const double prev = level;
                    level = a * y[t] + (1.0 - a) * (level + trend);
                    trend = b * (level - prev) + (1.0 - b) * trend;
                }
            }
            const double mse = n > 0 ? se / static_cast<double>(n) : 0.0;
            if (mse < best_mse) {
                best_mse = mse;
                best.alpha = a;
                best.beta = b;
            }
        }
    return best;
}

// Burst verdict from a k-window prefix of the cumulative size series,
// extrapolated to the full horizon.
inline bool holt_burst_verdict(const std::vector<double>& cumulative_sizes, int k, int q_total,
                               std::int64_t burst_threshold, const HoltState& st) {
    std::vector<double> prefix(cumulative_sizes.begin(),
                               cumulative_sizes.begin() + std::min<std::size_t>(
                                   static_cast<std::size_t>(k), cumulative_sizes.size()));
    if (prefix.size() < 2) prefix.push_back(prefix.empty() ? 0.0 : prefix.back());
    const double fc = holt_forecast(prefix, q_total - static_cast<int>(prefix.size()) + 1,
                                    st.alpha, st.beta);
    return fc >= static_cast<double>(burst_threshold);
}

// ---- flat-feature classifiers (LR, FFNN) ----------------------------------------
// Same inputs as TW-LSTM with the micro sequence flattened, plus the chained
// prior; LR is the single-sigmoid special case.

struct FlatModel {
    DenseStack net;
    Vec mean, std; // feature standardization, fitted on the training set
};

namespace detail {

inline Vec flat_features(const WindowObservation& obs) {
    const Vec macro = raw_macro(obs.macro, /*use_ctype=*/true);
    const Mat micro = micro_input(obs.micro);
    Vec x(macro.rows + micro.rows * micro.cols, 1);
    int at = 0;
    for (int i = 0; i < macro.rows; ++i) x[at++] = macro[i];
    for (int t = 0; t < micro.rows; ++t)
        for (int j = 0; j < micro.cols; ++j) x[at++] = micro(t, j);
    return x;
}

} // namespace detail

inline double flat_predict(const FlatModel& m, const WindowObservation& obs, double prior) {
    Vec f = detail::flat_features(obs);
    Vec x(f.rows + 1, 1);
    for (int i = 0; i < f.rows; ++i) x[i] = (f[i] - m.mean[i]) / m.std[i];
    x[f.rows] = prior;
    return dense_forward(m.net, x)[0];
}

// widths: hidden layer sizes; empty for plain logistic regression.
inline FlatModel train_flat(const std::vector<BurstSample>& data, const TrainConfig& cfg,
                            const std::vector<int>& widths) {
    if (data.empty()) throw ConfigError("train_flat: empty training set");
    std::int64_t pos = 0;
    for (const BurstSample& s : data) pos += s.explosive ? 1 : 0;
    if (pos == 0 || pos == static_cast<std::int64_t>(data.size()))
        throw ConfigError("train_flat: degenerate single-class training set");

    Rng rng(derive_seed(cfg.seed, 0x666c6174ULL));
    const int fdim = detail::flat_features(data.front().windows.front()).rows;

    FlatModel m;
    m.mean = Vec(fdim, 1);
    m.std = Vec(fdim, 1);
    {
        Vec sum(fdim, 1), sq(fdim, 1);
        std::int64_t n = 0;
        for (const BurstSample& s : data)
            for (const WindowObservation& obs : s.windows) {
                const Vec x = detail::flat_features(obs);
                for (int i = 0; i < fdim; ++i) {
                    sum[i] += x[i];
                    sq[i] += x[i] * x[i];
                }
                ++n;
            }
        for (int i = 0; i < fdim; ++i) {
            const double mean = sum[i] / static_cast<double>(n);
            const double var = sq[i] / static_cast<double>(n) - mean * mean;
            m.mean[i] = mean;
            m.std[i] = var > 1e-12 ? std::sqrt(var) : 1.0;
        }
    }

    std::vector<std::pair<int, Act>> layers;
    for (int w : widths) layers.emplace_back(w, Act::Tanh);
    layers.emplace_back(1, Act::Sigmoid);
    m.net = make_dense(fdim + 1, layers, rng);

    const double pos_w = static_cast<double>(data.size()) / (2.0 * static_cast<double>(pos));
    const double neg_w =
        static_cast<double>(data.size()) / (2.0 * static_cast<double>(data.size() - pos));

    NamedTensors params = tensors(m.net, "net");
    std::vector<Mat*> pptr = tensor_ptrs(params);
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
                Vec f = detail::flat_features(obs);
                Vec x(f.rows + 1, 1);
                for (int i = 0; i < f.rows; ++i) x[i] = (f[i] - m.mean[i]) / m.std[i];
                x[f.rows] = prior;

                DenseCache cache;
                const Vec out = dense_forward(m.net, x, &cache);
                const double pc = std::clamp(out[0], 1e-12, 1.0 - 1e-12);
                Vec dy(1, 1);
                dy[0] = w * (pc - y) / (pc * (1.0 - pc));
                DenseGrads g = make_grads(m.net);
                dense_backward(m.net, cache, dy, g);

                NamedTensors gts;
                for (std::size_t i = 0; i < g.dW.size(); ++i) {
                    gts.emplace_back("W", &g.dW[i]);
                    gts.emplace_back("b", &g.db[i]);
                }
                std::vector<Mat*> gptr = tensor_ptrs(gts);
                adam_step(adam, pptr, {gptr.begin(), gptr.end()});
                prior = out[0];
            }
        }
    }
    return m;
}

inline FlatModel train_lr(const std::vector<BurstSample>& data, const TrainConfig& cfg) {
    return train_flat(data, cfg, {});
}

inline FlatModel train_ffnn(const std::vector<BurstSample>& data, const TrainConfig& cfg) {
    return train_flat(data, cfg, {64, 32, 16});
}

inline double flat_accuracy(const FlatModel& m, const std::vector<BurstSample>& data, int k,
                            double threshold = 0.5) {
    std::int64_t correct = 0;
    for (const BurstSample& s : data) {
        double prior = 0.5, p = 0.5;
        for (int w = 0; w < k && w < static_cast<int>(s.windows.size()); ++w) {
            p = flat_predict(m, s.windows[static_cast<std::size_t>(w)], prior);
            prior = p;
        }
        if ((p >= threshold) == s.explosive) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace cpkit

#endif
