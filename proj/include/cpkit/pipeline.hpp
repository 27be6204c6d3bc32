#ifndef CPKIT_PIPELINE_HPP
#define CPKIT_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cpkit/baselines.hpp"
#include "cpkit/cascade.hpp"
#include "cpkit/config.hpp"
#include "cpkit/features.hpp"
#include "cpkit/gan.hpp"
#include "cpkit/metrics.hpp"
#include "cpkit/placement.hpp"
#include "cpkit/predictor.hpp"

namespace cpkit {

// ---- dataset assembly -------------------------------------------------------

inline BurstSample make_burst_sample(const Cascade& c, const WindowSpec& spec, int n_regions,
                                     std::int64_t burst_threshold) {
    BurstSample s;
    s.explosive = c.size() >= burst_threshold;
    for (int k = 1; k <= spec.max_windows; ++k)
        s.windows.push_back(extract_window(c, spec, k, n_regions));
    return s;
}

inline std::vector<BurstSample> make_burst_samples(const std::vector<Cascade>& corpus,
                                                   const WindowSpec& spec, int n_regions,
                                                   std::int64_t burst_threshold) {
    std::vector<BurstSample> out;
    out.reserve(corpus.size());
    for (const Cascade& c : corpus)
        out.push_back(make_burst_sample(c, spec, n_regions, burst_threshold));
    return out;
}

// Per-region capacities from a seeded draw, scaled so the total is
// factor x total_demand exactly (largest-remainder). Weights track demand
// (providers provision where the users are), with multiplicative noise so
// the capacity constraint is occasionally binding.
inline std::vector<std::int64_t> make_capacities(std::uint64_t seed,
                                                 const std::vector<std::int64_t>& demand,
                                                 double factor) {
    Rng rng(derive_seed(seed, 0x636170ULL));
    std::int64_t total = 0;
    for (std::int64_t s : demand) total += s;
    std::vector<double> w(demand.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        w[j] = (static_cast<double>(demand[j]) + 1.0) * uniform(rng, 0.8, 1.2);
    return largest_remainder(static_cast<std::int64_t>(std::llround(factor * static_cast<double>(total))),
                             w);
}

inline std::vector<std::int64_t> region_counts(const Cascade& c, int n_regions) {
    std::vector<std::int64_t> s(static_cast<std::size_t>(n_regions), 0);
    for (const CascadeEvent& ev : c.events) ++s[static_cast<std::size_t>(ev.region)];
    return s;
}

inline PlacementInstance make_instance(const std::vector<std::int64_t>& demand,
                                       const LatencyMatrix& latency, int max_replicas,
                                       std::uint64_t cap_seed, double capacity_factor) {
    PlacementInstance inst;
    inst.m = latency.m;
    inst.demand = demand;
    inst.latency = latency;
    inst.max_replicas = max_replicas;
    inst.capacity = make_capacities(cap_seed, demand, capacity_factor);
    return inst;
}

// ---- pipeline stages -----------------------------------------------------------
// Every stage is a pure function of (config, input files); a stage is skipped
// when its output file already exists, so deleting one artifact and re-running
// regenerates only that artifact and everything downstream of it.

struct PipelinePaths {
    std::filesystem::path dir;

    std::string corpus() const { return (dir / "corpus.txt").string(); }
    std::string features() const { return (dir / "features.csv").string(); }
    std::string burst_model() const { return (dir / "burst_model.txt").string(); }
    std::string geo_model() const { return (dir / "geo_model.txt").string(); }
    std::string labels() const { return (dir / "labels.csv").string(); }
    std::string gan_model() const { return (dir / "gan_model.txt").string(); }
    std::string report_csv() const { return (dir / "report.csv").string(); }
    std::string report_jsonl() const { return (dir / "report.jsonl").string(); }
    std::string loads_csv() const { return (dir / "loads.csv").string(); }
};

inline void stage_generate(const PipelineConfig& cfg, const std::string& corpus_path) {
    const std::vector<Cascade> corpus = generate_corpus(cfg.generator(), cfg.n_cascades);
    write_corpus(corpus_path, corpus);
}

inline void stage_extract(const PipelineConfig& cfg, const std::string& corpus_path,
                          const std::string& features_path) {
    const std::vector<Cascade> corpus = read_corpus(corpus_path);
    const WindowSpec spec = cfg.windows();
    std::ofstream out(features_path);
    if (!out) throw ParseError("cannot open for writing: " + features_path);
    write_feature_header(out, spec, cfg.n_regions);
    for (const Cascade& c : corpus) {
        const BurstLabel lb = label(c, cfg.burst_threshold, cfg.n_regions);
        for (int k = 1; k <= spec.max_windows; ++k)
            write_feature_row(out, c, extract_window(c, spec, k, cfg.n_regions), lb);
    }
}

inline std::size_t train_count(const PipelineConfig& cfg, std::size_t n) {
    return static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(n));
}

inline void stage_train_burst(const PipelineConfig& cfg, const std::string& corpus_path,
                              const std::string& model_path) {
    const std::vector<Cascade> corpus = read_corpus(corpus_path);
    std::vector<BurstSample> samples =
        make_burst_samples(corpus, cfg.windows(), cfg.n_regions, cfg.burst_threshold);
    samples.resize(train_count(cfg, samples.size()));
    TrainConfig tc;
    tc.seed = cfg.seed;
    tc.epochs = cfg.epochs_burst;
    tc.lr = cfg.lr;
    tc.hidden = cfg.hidden;
    TwLstmModel m = train_burst(samples, tc);
    save_twlstm(model_path, m);
}

// The geo model trains on the window where the burst model first fires
// (last observation window when it never does).
inline int declared_window(const TwLstmModel& m, const std::vector<WindowObservation>& windows,
                           double threshold) {
    const RollingVerdict v = rolling_predict(m, windows, threshold);
    return v.burst_window > 0 ? v.burst_window : static_cast<int>(windows.size());
}

inline void stage_train_geo(const PipelineConfig& cfg, const std::string& corpus_path,
                            const std::string& burst_model_path, const std::string& model_path) {
    const std::vector<Cascade> corpus = read_corpus(corpus_path);
    const WindowSpec spec = cfg.windows();
    const TwLstmModel burst_model = load_twlstm(burst_model_path);

    std::vector<GeoSample> samples;
    const std::size_t n_train = train_count(cfg, corpus.size());
    for (std::size_t i = 0; i < n_train; ++i) {
        const Cascade& c = corpus[i];
        if (c.size() < cfg.burst_threshold) continue;
        const BurstSample bs = make_burst_sample(c, spec, cfg.n_regions, cfg.burst_threshold);
        const int k = declared_window(burst_model, bs.windows, cfg.decision_threshold);
        GeoSample gs;
        gs.seq = geo_micro_sequence(c, spec, k, cfg.n_regions);
        gs.final_geo = label(c, cfg.burst_threshold, cfg.n_regions).final_geo;
        samples.push_back(std::move(gs));
    }
    TrainConfig tc;
    tc.seed = cfg.seed;
    tc.epochs = cfg.epochs_geo;
    tc.lr = cfg.lr;
    tc.hidden = cfg.geo_hidden;
    GeoPredictor g = train_geo(samples, tc, cfg.n_regions);
    save_geo(model_path, g);
}

inline void stage_solve_labels(const PipelineConfig& cfg, const std::string& corpus_path,
                               const std::string& labels_path) {
    const std::vector<Cascade> corpus = read_corpus(corpus_path);
    const RegionSet regions = make_regions(cfg.seed, cfg.n_regions);
    const LatencyMatrix latency = latency_from_coords(regions, cfg.latency_scale);

    std::vector<LabeledSample> labeled;
    const std::size_t n_train = train_count(cfg, corpus.size());
    for (std::size_t i = 0; i < n_train && static_cast<int>(labeled.size()) < cfg.n_labels; ++i) {
        const Cascade& c = corpus[i];
        if (c.size() < cfg.burst_threshold) continue;
        const PlacementInstance inst = make_instance(region_counts(c, cfg.n_regions), latency,
                                                     cfg.max_replicas, cfg.seed, cfg.capacity_factor);
        // a burst whose demand no replica set of size <= C can serve has no label
        if (!coverage_feasible(inst)) continue;
        LabeledSample s;
        s.x = label(c, cfg.burst_threshold, cfg.n_regions).final_geo;
        s.y = exact_solve(inst).first;
        labeled.push_back(std::move(s));
    }
    std::ofstream out(labels_path);
    if (!out) throw ParseError("cannot open for writing: " + labels_path);
    write_labeled_samples(out, labeled, cfg.max_replicas);
}

inline void stage_train_gan(const PipelineConfig& cfg, const std::string& corpus_path,
                            const std::string& labels_path, const std::string& model_path) {
    std::ifstream in(labels_path);
    if (!in) throw ParseError("cannot open for reading: " + labels_path);
    const std::vector<LabeledSample> labeled = read_labeled_samples(in, cfg.n_regions);

    // Unlabeled reals: geo distributions of training-set bursts beyond the
    // labeled budget (no solver run needed for these).
    const std::vector<Cascade> corpus = read_corpus(corpus_path);
    std::vector<GeoDistribution> unlabeled;
    const std::size_t n_train = train_count(cfg, corpus.size());
    std::size_t bursts_seen = 0;
    for (std::size_t i = 0; i < n_train; ++i) {
        const Cascade& c = corpus[i];
        if (c.size() < cfg.burst_threshold) continue;
        if (static_cast<int>(bursts_seen) >= cfg.n_labels)
            unlabeled.push_back(label(c, cfg.burst_threshold, cfg.n_regions).final_geo);
        ++bursts_seen;
    }
    GanTrainConfig gc;
    gc.seed = cfg.seed;
    gc.epochs = cfg.gan_epochs;
    gc.lr = cfg.gan_lr;
    gc.batch = cfg.gan_batch;
    gc.noise_dim = cfg.noise_dim;
    auto [gen, disc] = gan_train(gc, labeled, unlabeled, cfg.n_regions);
    save_gan(model_path, gen, disc);
}

// ---- evaluation -----------------------------------------------------------------

struct MethodReport {
    std::string method;
    double mean_latency_ms = 0.0;
    double mean_reduction = 0.0;
    std::vector<double> satisfaction; // one per gamma grid point
    std::vector<double> mean_load;    // one per region
    int instances = 0;
};

inline void stage_evaluate(const PipelineConfig& cfg, const PipelinePaths& paths) {
    const std::vector<Cascade> corpus = read_corpus(paths.corpus());
    const WindowSpec spec = cfg.windows();
    const RegionSet regions = make_regions(cfg.seed, cfg.n_regions);
    const LatencyMatrix latency = latency_from_coords(regions, cfg.latency_scale);
    const TwLstmModel burst_model = load_twlstm(paths.burst_model());
    const GeoPredictor geo_model = load_geo(paths.geo_model());
    auto [gen, disc] = load_gan(paths.gan_model());
    (void)gen;

    // history for statistics-based placement: training-set burst distributions
    std::vector<GeoDistribution> history;
    const std::size_t n_train = train_count(cfg, corpus.size());
    for (std::size_t i = 0; i < n_train; ++i)
        if (corpus[i].size() >= cfg.burst_threshold)
            history.push_back(label(corpus[i], cfg.burst_threshold, cfg.n_regions).final_geo);

    const std::vector<std::string> methods = {"exact",      "cpgan",      "greedy",
                                              "heuristic",  "distance",   "statistics",
                                              "no_replication"};
    std::map<std::string, MethodReport> reports;
    for (const std::string& m : methods) {
        reports[m].method = m;
        reports[m].satisfaction.assign(cfg.gamma_grid.size(), 0.0);
        reports[m].mean_load.assign(static_cast<std::size_t>(cfg.n_regions), 0.0);
    }

    int evaluated = 0;
    for (std::size_t i = n_train; i < corpus.size() && evaluated < cfg.eval_max_instances; ++i) {
        const Cascade& c = corpus[i];
        if (c.size() < cfg.burst_threshold) continue;
        const PlacementInstance inst = make_instance(region_counts(c, cfg.n_regions), latency,
                                                     cfg.max_replicas, cfg.seed, cfg.capacity_factor);
        if (!coverage_feasible(inst)) continue; // unservable under the replica budget
        const BurstSample bs = make_burst_sample(c, spec, cfg.n_regions, cfg.burst_threshold);
        const int k = declared_window(burst_model, bs.windows, cfg.decision_threshold);
        const GeoDistribution predicted =
            predict_geo(geo_model, geo_micro_sequence(c, spec, k, cfg.n_regions));
        const Assignment no_rep = no_replication_assignment(inst, 0);
        const double base = no_rep.total_latency_ms();

        std::map<std::string, Assignment> assignments;
        assignments["no_replication"] = no_rep;
        assignments["exact"] = exact_solve(inst).second;
        assignments["greedy"] = greedy_place(inst).second;
        assignments["heuristic"] = heuristic_place(inst, predicted).second;
        assignments["distance"] = transport_solve(inst, distance_aware_place(inst));
        assignments["statistics"] = transport_solve(inst, statistics_place(history, inst));
        assignments["cpgan"] =
            transport_solve(inst, infer_placement_feasible(disc, predicted, inst));

        for (const std::string& m : methods) {
            const Assignment& a = assignments[m];
            MethodReport& r = reports[m];
            r.mean_latency_ms += a.total_latency_ms();
            r.mean_reduction += latency_reduction(a.total_latency_ms(), base);
            for (std::size_t gi = 0; gi < cfg.gamma_grid.size(); ++gi)
                r.satisfaction[gi] += satisfaction_ratio(a, latency, cfg.gamma_grid[gi]);
            const std::vector<double> load = server_load_ratio(a);
            for (int j = 0; j < cfg.n_regions; ++j)
                r.mean_load[static_cast<std::size_t>(j)] += load[static_cast<std::size_t>(j)];
            ++r.instances;
        }
        ++evaluated;
    }
    if (evaluated == 0) throw ConfigError("evaluate: no explosive held-out cascades to evaluate");

    for (auto& [name, r] : reports) {
        const double n = static_cast<double>(r.instances);
        r.mean_latency_ms /= n;
        r.mean_reduction /= n;
        for (double& s : r.satisfaction) s /= n;
        for (double& l : r.mean_load) l /= n;
    }

    std::ofstream csv(paths.report_csv());
    if (!csv) throw ParseError("cannot open for writing: " + paths.report_csv());
    csv << "method,instances,mean_latency_ms,mean_reduction";
    for (double g : cfg.gamma_grid) csv << ",sat_" << g;
    csv << '\n';
    for (const std::string& m : methods) {
        const MethodReport& r = reports[m];
        csv << r.method << ',' << r.instances << ',' << r.mean_latency_ms << ',' << r.mean_reduction;
        for (double s : r.satisfaction) csv << ',' << s;
        csv << '\n';
    }

    std::ofstream loads(paths.loads_csv());
    if (!loads) throw ParseError("cannot open for writing: " + paths.loads_csv());
    loads << "method,region,mean_load\n";
    for (const std::string& m : methods)
        for (int j = 0; j < cfg.n_regions; ++j)
            loads << m << ',' << j << ',' << reports[m].mean_load[static_cast<std::size_t>(j)] << '\n';

    std::ofstream jsonl(paths.report_jsonl());
    if (!jsonl) throw ParseError("cannot open for writing: " + paths.report_jsonl());
    for (const std::string& m : methods) {
        const MethodReport& r = reports[m];
        jsonl << "{\"method\":\"" << r.method << "\",\"instances\":" << r.instances
              << ",\"mean_latency_ms\":" << r.mean_latency_ms
              << ",\"mean_reduction\":" << r.mean_reduction << ",\"satisfaction\":[";
        for (std::size_t gi = 0; gi < r.satisfaction.size(); ++gi)
            jsonl << (gi ? "," : "") << r.satisfaction[gi];
        jsonl << "],\"mean_load\":[";
        for (std::size_t j = 0; j < r.mean_load.size(); ++j)
            jsonl << (j ? "," : "") << r.mean_load[j];
        jsonl << "]}\n";
    }
}

// Runs every stage in order, skipping stages whose outputs already exist.
// Decision-time benchmarking is deliberately not part of the pipeline: the
// reports here are byte-reproducible functions of (config, seed), wall-clock
// timings are not. Use the `bench` subcommand for timings.
inline void run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                         std::ostream& log = std::cout) {
    PipelinePaths paths{out_dir};
    std::filesystem::create_directories(paths.dir);
    auto stage = [&](const std::string& name, const std::string& output, auto&& fn) {
        if (std::filesystem::exists(output)) {
            log << "[pipeline] " << name << ": " << output << " exists, skipping\n";
            return;
        }
        log << "[pipeline] " << name << "...\n";
        try {
            fn();
        } catch (const std::exception& e) {
            throw std::runtime_error("pipeline stage '" + name + "' failed: " + e.what());
        }
    };
    stage("generate", paths.corpus(), [&] { stage_generate(cfg, paths.corpus()); });
    stage("extract", paths.features(), [&] { stage_extract(cfg, paths.corpus(), paths.features()); });
    stage("train-burst", paths.burst_model(),
          [&] { stage_train_burst(cfg, paths.corpus(), paths.burst_model()); });
    stage("train-geo", paths.geo_model(),
          [&] { stage_train_geo(cfg, paths.corpus(), paths.burst_model(), paths.geo_model()); });
    stage("solve-labels", paths.labels(),
          [&] { stage_solve_labels(cfg, paths.corpus(), paths.labels()); });
    stage("train-gan", paths.gan_model(),
          [&] { stage_train_gan(cfg, paths.corpus(), paths.labels(), paths.gan_model()); });
    stage("evaluate", paths.report_csv(), [&] { stage_evaluate(cfg, paths); });
}

} // namespace cpkit

#endif
