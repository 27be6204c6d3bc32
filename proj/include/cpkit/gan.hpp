#ifndef CPKIT_GAN_HPP
#define CPKIT_GAN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "cpkit/errors.hpp"
#include "cpkit/features.hpp"
#include "cpkit/neural.hpp"
#include "cpkit/placement.hpp"

namespace cpkit {

// Generator: noise vector -> point on the M-simplex.
struct GeneratorNet {
    int noise_dim = 16;
    DenseStack net; // 32, 64, 128 tanh, then M softmax
};

// Discriminator: geo-distribution -> M per-region placement probabilities
// (head A) plus one fake/real probability (head B, the (M+1)-th output).
struct DiscriminatorNet {
    int m_regions = 0;
    DenseStack net; // 3 x 64 tanh trunk, then M+1 sigmoid
};

inline GeneratorNet make_generator(int m_regions, int noise_dim, Rng& rng) {
    GeneratorNet g;
    g.noise_dim = noise_dim;
    g.net = make_dense(noise_dim,
                       {{32, Act::Tanh}, {64, Act::Tanh}, {128, Act::Tanh}, {m_regions, Act::Softmax}},
                       rng);
    return g;
}

inline DiscriminatorNet make_discriminator(int m_regions, Rng& rng) {
    DiscriminatorNet d;
    d.m_regions = m_regions;
    d.net = make_dense(m_regions,
                       {{64, Act::Tanh}, {64, Act::Tanh}, {64, Act::Tanh}, {m_regions + 1, Act::Sigmoid}},
                       rng);
    return d;
}

struct LabeledSample {
    GeoDistribution x;
    PlacementDecision y; // from the exact solver
};

struct GanTrainConfig {
    std::uint64_t seed = 0;
    int epochs = 60;
    double lr = 1e-3;
    int batch = 16;
    int noise_dim = 16;
    bool semi_supervised = true; // false: discriminator trained on L_s only
};

inline Vec disc_forward(const DiscriminatorNet& d, const GeoDistribution& x,
                        DenseCache* cache = nullptr) {
    if (static_cast<int>(x.x.size()) != d.m_regions)
        throw ShapeError("disc_forward: region count mismatch");
    Vec in(d.m_regions, 1);
    for (int i = 0; i < d.m_regions; ++i) in[i] = x.x[static_cast<std::size_t>(i)];
    return dense_forward(d.net, in, cache);
}

inline double p_fake(const DiscriminatorNet& d, const GeoDistribution& x) {
    return disc_forward(d, x)[d.m_regions];
}

inline GeoDistribution generate(const GeneratorNet& g, Rng& rng, DenseCache* cache = nullptr,
                                Vec* z_out = nullptr) {
    Vec z(g.noise_dim, 1);
    for (double& v : z.v) v = gauss(rng);
    if (z_out) *z_out = z;
    const Vec out = dense_forward(g.net, z, cache);
    GeoDistribution d;
    d.x.assign(out.v.begin(), out.v.end());
    return d;
}

struct DLoss {
    double total = 0.0;
    double supervised = 0.0;
    double unsupervised = 0.0;
};

namespace gan_detail {

inline double clamp_p(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

} // namespace gan_detail

// Supervised per-region binary cross-entropy on head A, labeled reals only.
inline double d_supervised_loss(const DiscriminatorNet& d, const std::vector<LabeledSample>& batch) {
    if (batch.empty()) throw ConfigError("d_supervised_loss: empty batch");
    double ls = 0.0;
    for (const LabeledSample& s : batch) {
        const Vec out = disc_forward(d, s.x);
        for (int j = 0; j < d.m_regions; ++j) {
            const double p = gan_detail::clamp_p(out[j]);
            const double y = s.y.open[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
            ls += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
    }
    return ls / static_cast<double>(batch.size());
}

// L = L_s + L_u with L_u the standard real/fake cross-entropy on head B.
inline DLoss d_loss(const DiscriminatorNet& d, const std::vector<LabeledSample>& labeled,
                    const std::vector<GeoDistribution>& real_unlabeled,
                    const std::vector<GeoDistribution>& generated) {
    if (labeled.empty() || real_unlabeled.empty() || generated.empty())
        throw ConfigError("d_loss: empty batch");
    DLoss out;
    out.supervised = d_supervised_loss(d, labeled);
    double lu = 0.0;
    for (const GeoDistribution& x : real_unlabeled)
        lu -= std::log(gan_detail::clamp_p(1.0 - p_fake(d, x)));
    lu /= static_cast<double>(real_unlabeled.size());
    double lg = 0.0;
    for (const GeoDistribution& x : generated) lg -= std::log(gan_detail::clamp_p(p_fake(d, x)));
    out.unsupervised = lu + lg / static_cast<double>(generated.size());
    out.total = out.supervised + out.unsupervised;
    return out;
}

// Non-saturating generator objective on head B.
inline double g_loss(const DiscriminatorNet& d, const std::vector<GeoDistribution>& generated) {
    if (generated.empty()) throw ConfigError("g_loss: empty batch");
    double l = 0.0;
    for (const GeoDistribution& x : generated)
        l -= std::log(gan_detail::clamp_p(1.0 - p_fake(d, x)));
    return l / static_cast<double>(generated.size());
}

// Top-C head-A probabilities (ties to the lowest region id).
inline PlacementDecision infer_placement(const DiscriminatorNet& d, const GeoDistribution& x,
                                         int c) {
    if (c < 1 || c > d.m_regions) throw ConfigError("infer_placement: C out of range");
    const Vec out = disc_forward(d, x);
    std::vector<int> order(static_cast<std::size_t>(d.m_regions));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return out[a] > out[b]; });
    PlacementDecision dec;
    dec.open.assign(static_cast<std::size_t>(d.m_regions), 0);
    for (int k = 0; k < c; ++k) dec.open[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
    return dec;
}

// infer_placement followed by a capacity check against the instance; while the
// chosen set cannot serve total demand, the open region with the lowest head-A
// probability is swapped for the closed region with the largest capacity.
inline PlacementDecision infer_placement_feasible(const DiscriminatorNet& d,
                                                  const GeoDistribution& x,
                                                  const PlacementInstance& inst) {
    PlacementDecision dec = infer_placement(d, x, inst.max_replicas);
    const Vec out = disc_forward(d, x);
    const std::int64_t total = inst.total_demand();
    auto open_cap = [&]() {
        std::int64_t cap = 0;
        for (int j = 0; j < inst.m; ++j)
            if (dec.open[static_cast<std::size_t>(j)]) cap += inst.capacity[static_cast<std::size_t>(j)];
        return cap;
    };
    while (open_cap() < total) {
        int best_closed = -1;
        for (int j = 0; j < inst.m; ++j)
            if (!dec.open[static_cast<std::size_t>(j)] &&
                (best_closed < 0 || inst.capacity[static_cast<std::size_t>(j)] >
                                        inst.capacity[static_cast<std::size_t>(best_closed)]))
                best_closed = j;
        // evict the least likely replica among those the swap strictly improves;
        // each swap raises open capacity, so this halts at the top-C capacity set
        int worst_open = -1;
        for (int j = 0; j < inst.m; ++j)
            if (dec.open[static_cast<std::size_t>(j)] && best_closed >= 0 &&
                inst.capacity[static_cast<std::size_t>(j)] <
                    inst.capacity[static_cast<std::size_t>(best_closed)] &&
                (worst_open < 0 || out[j] < out[worst_open]))
                worst_open = j;
        if (best_closed < 0 || worst_open < 0)
            throw InfeasibleError("repair exhausted: instance capacity too small for any C-subset");
        dec.open[static_cast<std::size_t>(worst_open)] = 0;
        dec.open[static_cast<std::size_t>(best_closed)] = 1;
    }
    return dec;
}

// Alternating D/G training. Each round draws a labeled batch, an unlabeled
// real batch and a same-size generated batch; the discriminator descends
// L_s (+ L_u when semi-supervised), then the generator descends g_loss
// through the frozen discriminator.
inline std::pair<GeneratorNet, DiscriminatorNet> gan_train(
    const GanTrainConfig& cfg, const std::vector<LabeledSample>& labeled,
    const std::vector<GeoDistribution>& unlabeled, int m_regions) {
    if (labeled.empty()) throw ConfigError("gan_train: need at least one labeled sample");
    Rng rng(derive_seed(cfg.seed, 0x67616eULL));
    GeneratorNet gen = make_generator(m_regions, cfg.noise_dim, rng);
    DiscriminatorNet disc = make_discriminator(m_regions, rng);

    NamedTensors dparams = tensors(disc.net, "disc");
    NamedTensors gparams = tensors(gen.net, "gen");
    std::vector<Mat*> dptr = tensor_ptrs(dparams);
    std::vector<Mat*> gptr = tensor_ptrs(gparams);
    AdamState d_adam, g_adam;
    d_adam.cfg.lr = cfg.lr;
    g_adam.cfg.lr = cfg.lr;
    d_adam.init(dptr);
    g_adam.init(gptr);

    const int batch = std::max(1, cfg.batch);
    const int rounds_per_epoch =
        std::max<int>(1, static_cast<int>(labeled.size()) / batch);

    auto pick_labeled = [&]() { return uniform_int(rng, 0, static_cast<int>(labeled.size()) - 1); };
    auto pick_unlabeled = [&]() {
        if (unlabeled.empty()) return -1;
        return uniform_int(rng, 0, static_cast<int>(unlabeled.size()) - 1);
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int round = 0; round < rounds_per_epoch; ++round) {
            // ---- discriminator step
            DenseGrads dg = make_grads(disc.net);
            for (int b = 0; b < batch; ++b) {
                const LabeledSample& s = labeled[static_cast<std::size_t>(pick_labeled())];
                DenseCache cache;
                const Vec out = disc_forward(disc, s.x, &cache);
                Vec dy(m_regions + 1, 1);
                for (int j = 0; j < m_regions; ++j) {
                    const double p = gan_detail::clamp_p(out[j]);
                    const double y = s.y.open[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
                    dy[j] = (p - y) / (p * (1.0 - p)) / static_cast<double>(batch);
                }
                dense_backward(disc.net, cache, dy, dg);
            }
            if (cfg.semi_supervised) {
                for (int b = 0; b < batch; ++b) {
                    // real sample: labeled pool backs up an empty unlabeled pool
                    const int ui = pick_unlabeled();
                    const GeoDistribution& x =
                        ui >= 0 ? unlabeled[static_cast<std::size_t>(ui)]
                                : labeled[static_cast<std::size_t>(pick_labeled())].x;
                    DenseCache cache;
                    const Vec out = disc_forward(disc, x, &cache);
                    Vec dy(m_regions + 1, 1);
                    const double pf = gan_detail::clamp_p(out[m_regions]);
                    dy[m_regions] = 1.0 / (1.0 - pf) / static_cast<double>(batch);
                    dense_backward(disc.net, cache, dy, dg);
                }
                for (int b = 0; b < batch; ++b) {
                    const GeoDistribution x = generate(gen, rng);
                    DenseCache cache;
                    const Vec out = disc_forward(disc, x, &cache);
                    Vec dy(m_regions + 1, 1);
                    const double pf = gan_detail::clamp_p(out[m_regions]);
                    dy[m_regions] = -1.0 / pf / static_cast<double>(batch);
                    dense_backward(disc.net, cache, dy, dg);
                }
            }
            {
                NamedTensors gts;
                for (std::size_t i = 0; i < dg.dW.size(); ++i) {
                    gts.emplace_back("W", &dg.dW[i]);
                    gts.emplace_back("b", &dg.db[i]);
                }
                std::vector<Mat*> p = tensor_ptrs(gts);
                adam_step(d_adam, dptr, {p.begin(), p.end()});
            }

            // ---- generator step
            if (cfg.semi_supervised) {
                DenseGrads gg = make_grads(gen.net);
                for (int b = 0; b < batch; ++b) {
                    DenseCache gen_cache;
                    const GeoDistribution x = generate(gen, rng, &gen_cache);
                    DenseCache disc_cache;
                    const Vec out = disc_forward(disc, x, &disc_cache);
                    Vec dy(m_regions + 1, 1);
                    const double pf = gan_detail::clamp_p(out[m_regions]);
                    dy[m_regions] = 1.0 / (1.0 - pf) / static_cast<double>(batch);
                    DenseGrads scratch = make_grads(disc.net);
                    dense_backward(disc.net, disc_cache, dy, scratch);
                    dense_backward(gen.net, gen_cache, scratch.dx, gg);
                }
                NamedTensors gts;
                for (std::size_t i = 0; i < gg.dW.size(); ++i) {
                    gts.emplace_back("W", &gg.dW[i]);
                    gts.emplace_back("b", &gg.db[i]);
                }
                std::vector<Mat*> p = tensor_ptrs(gts);
                adam_step(g_adam, gptr, {p.begin(), p.end()});
            }
        }
    }
    return {std::move(gen), std::move(disc)};
}

// ---- labeled-sample CSV: x_1..x_M, I_1..I_M, C --------------------------------

inline void write_labeled_samples(std::ostream& out, const std::vector<LabeledSample>& samples,
                                  int c) {
    for (const LabeledSample& s : samples) {
        for (double v : s.x.x) out << v << ',';
        for (int b : s.y.open) out << b << ',';
        out << c << '\n';
    }
}

inline std::vector<LabeledSample> read_labeled_samples(std::istream& in, int m_regions) {
    std::vector<LabeledSample> out;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        LabeledSample s;
        std::string tok;
        for (int i = 0; i < 2 * m_regions + 1; ++i) {
            if (!std::getline(ls, tok, ','))
                throw ParseError("labeled samples line " + std::to_string(lineno) + ": short row");
            if (i < m_regions)
                s.x.x.push_back(std::stod(tok));
            else if (i < 2 * m_regions)
                s.y.open.push_back(std::stoi(tok));
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---- checkpoints ----------------------------------------------------------------

inline void save_gan(const std::string& path, GeneratorNet& gen, DiscriminatorNet& disc) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "cpgan v1 " << disc.m_regions << ' ' << gen.noise_dim << '\n';
    NamedTensors ts = tensors(gen.net, "gen");
    for (auto& t : tensors(disc.net, "disc")) ts.push_back(t);
    write_checkpoint(out, ts);
}

inline std::pair<GeneratorNet, DiscriminatorNet> load_gan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open for reading: " + path);
    std::string magic, version;
    int m = 0, noise = 0;
    if (!(in >> magic >> version >> m >> noise) || magic != "cpgan")
        throw ParseError("bad model header: " + path);
    Rng rng(0);
    GeneratorNet gen = make_generator(m, noise, rng);
    DiscriminatorNet disc = make_discriminator(m, rng);
    NamedTensors ts = tensors(gen.net, "gen");
    for (auto& t : tensors(disc.net, "disc")) ts.push_back(t);
    read_checkpoint(in, ts);
    return {std::move(gen), std::move(disc)};
}

} // namespace cpkit

#endif
