#ifndef CPKIT_CONFIG_HPP
#define CPKIT_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cpkit/cascade.hpp"
#include "cpkit/errors.hpp"
#include "cpkit/features.hpp"

namespace cpkit {

// Flat `key = value` file with `#` comments.
inline std::map<std::string, std::string> parse_config_text(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::int64_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

// Everything the pipeline needs, with desk-scale defaults.
struct PipelineConfig {
    std::uint64_t seed = 0;

    // corpus
    int n_regions = 15;
    std::int64_t n_cascades = 2000;
    double pattern_star = 0.25, pattern_split = 0.55, pattern_chain = 0.20;
    double burst_prob_political = 0.49, burst_prob_advertising = 0.19, burst_prob_other = 0.05;
    double region_concentration = 0.3;
    double region_stability = 60.0;
    double mean_branching = 20.0;
    double view_to_reshare_ratio = 7.0;
    std::int64_t horizon = 86400;
    std::int64_t burst_threshold = 2000;

    // windows
    std::int64_t window_length = 3600;
    int n_slots = 12;
    int max_windows = 5;

    // predictor training
    double train_fraction = 0.8;
    int epochs_burst = 6;
    int epochs_geo = 8;
    double lr = 2e-3;
    int hidden = 64;
    int geo_hidden = 32;
    double decision_threshold = 0.5;

    // placement
    int max_replicas = 5;
    double latency_scale = 0.0234; // ms per coordinate unit
    double capacity_factor = 1.5;  // total capacity / total demand
    int n_labels = 500;

    // gan
    int gan_epochs = 60;
    double gan_lr = 1e-3;
    int gan_batch = 16;
    int noise_dim = 16;

    // evaluation
    int eval_max_instances = 100;
    std::vector<double> gamma_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};

    GeneratorConfig generator() const {
        GeneratorConfig g;
        g.seed = seed;
        g.n_regions = n_regions;
        g.pattern_mix = {pattern_star, pattern_split, pattern_chain};
        g.ctype_burst_prob = {{ContentType::Political, burst_prob_political},
                              {ContentType::Advertising, burst_prob_advertising},
                              {ContentType::Other, burst_prob_other}};
        g.region_popularity_concentration = region_concentration;
        g.region_popularity_stability = region_stability;
        g.mean_branching = mean_branching;
        g.view_to_reshare_ratio = view_to_reshare_ratio;
        g.horizon = horizon;
        g.early_phase = static_cast<std::int64_t>(window_length) * max_windows;
        g.burst_threshold = burst_threshold;
        return g;
    }

    WindowSpec windows() const {
        WindowSpec s;
        s.window_length = window_length;
        s.n_slots = n_slots;
        s.max_windows = max_windows;
        return s;
    }
};

inline PipelineConfig load_pipeline_config(const std::map<std::string, std::string>& kv) {
    PipelineConfig c;
    auto geti = [&](const char* key, auto& target) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        std::istringstream ss(it->second);
        if (!(ss >> target)) throw ConfigError(std::string("bad value for ") + key);
    };
    geti("seed", c.seed);
    geti("n_regions", c.n_regions);
    geti("n_cascades", c.n_cascades);
    geti("pattern_star", c.pattern_star);
    geti("pattern_split", c.pattern_split);
    geti("pattern_chain", c.pattern_chain);
    geti("burst_prob_political", c.burst_prob_political);
    geti("burst_prob_advertising", c.burst_prob_advertising);
    geti("burst_prob_other", c.burst_prob_other);
    geti("region_concentration", c.region_concentration);
    geti("region_stability", c.region_stability);
    geti("mean_branching", c.mean_branching);
    geti("view_to_reshare_ratio", c.view_to_reshare_ratio);
    geti("horizon", c.horizon);
    geti("burst_threshold", c.burst_threshold);
    geti("window_length", c.window_length);
    geti("n_slots", c.n_slots);
    geti("max_windows", c.max_windows);
    geti("train_fraction", c.train_fraction);
    geti("epochs_burst", c.epochs_burst);
    geti("epochs_geo", c.epochs_geo);
    geti("lr", c.lr);
    geti("hidden", c.hidden);
    geti("geo_hidden", c.geo_hidden);
    geti("decision_threshold", c.decision_threshold);
    geti("max_replicas", c.max_replicas);
    geti("latency_scale", c.latency_scale);
    geti("capacity_factor", c.capacity_factor);
    geti("n_labels", c.n_labels);
    geti("gan_epochs", c.gan_epochs);
    geti("gan_lr", c.gan_lr);
    geti("gan_batch", c.gan_batch);
    geti("noise_dim", c.noise_dim);
    geti("eval_max_instances", c.eval_max_instances);
    if (auto it = kv.find("gamma_grid"); it != kv.end()) {
        c.gamma_grid.clear();
        std::istringstream ss(it->second);
        double g;
        while (ss >> g) c.gamma_grid.push_back(g);
        if (c.gamma_grid.empty()) throw ConfigError("gamma_grid: no values");
    }
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    return load_pipeline_config(parse_config_text(in));
}

} // namespace cpkit

#endif
