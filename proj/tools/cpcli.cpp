// Command-line front end for the cpkit content-placement toolkit.
//
// Subcommands mirror the pipeline stages plus ad-hoc decision and timing
// helpers. Exit codes: 0 success, 2 configuration error, 3 infeasible
// placement instance.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cpkit/pipeline.hpp"

namespace {

cpkit::PipelineConfig load_config(const std::string& config_path, std::uint64_t seed,
                                  bool seed_given) {
    cpkit::PipelineConfig cfg;
    if (!config_path.empty()) cfg = cpkit::load_pipeline_config(config_path);
    if (seed_given) cfg.seed = seed;
    return cfg;
}

std::vector<double> parse_distribution_line(const std::string& line, int m) {
    std::string cleaned = line;
    for (char& ch : cleaned)
        if (ch == ',') ch = ' ';
    std::istringstream ss(cleaned);
    std::vector<double> x;
    double v;
    while (ss >> v) x.push_back(v);
    if (static_cast<int>(x.size()) != m)
        throw cpkit::ConfigError("decide: expected " + std::to_string(m) + " values per line, got " +
                                 std::to_string(x.size()));
    return x;
}

void run_decide(const cpkit::PipelineConfig& cfg, const std::string& model_path,
                const std::string& input_path, const std::string& instance_path) {
    auto [gen, disc] = cpkit::load_gan(model_path);
    (void)gen;

    bool have_instance = !instance_path.empty();
    cpkit::PlacementInstance inst;
    if (have_instance) {
        std::ifstream f(instance_path);
        if (!f) throw cpkit::ConfigError("decide: cannot open instance: " + instance_path);
        inst = cpkit::read_instance(f);
    }

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!input_path.empty() && input_path != "-") {
        file.open(input_path);
        if (!file) throw cpkit::ConfigError("decide: cannot open input: " + input_path);
        in = &file;
    }

    std::string line;
    while (std::getline(*in, line)) {
        if (line.empty() || line[0] == '#') continue;
        cpkit::GeoDistribution x;
        x.x = parse_distribution_line(line, disc.m_regions);
        const cpkit::PlacementDecision dec =
            have_instance ? cpkit::infer_placement_feasible(disc, x, inst)
                          : cpkit::infer_placement(disc, x, cfg.max_replicas);
        for (std::size_t j = 0; j < dec.open.size(); ++j)
            std::cout << (j ? "," : "") << static_cast<int>(dec.open[j]);
        if (have_instance) {
            const cpkit::Assignment a = cpkit::transport_solve(inst, dec);
            std::cout << ',' << a.total_latency_ms();
        }
        std::cout << '\n';
    }
}

// Times greedy placement and CP-GAN inference over a replica-budget grid on
// one random instance per grid point. Single-threaded by construction.
void run_bench(const cpkit::PipelineConfig& cfg, int m, int reps, std::ostream& out) {
    const cpkit::RegionSet regions = cpkit::make_regions(cfg.seed, m);
    const cpkit::LatencyMatrix latency = cpkit::latency_from_coords(regions, cfg.latency_scale);
    cpkit::Rng rng(cpkit::derive_seed(cfg.seed, 0x62656e6368ULL));
    std::vector<std::int64_t> demand(static_cast<std::size_t>(m));
    for (auto& s : demand) s = cpkit::uniform_int(rng, 100, 5000);

    cpkit::DiscriminatorNet disc = cpkit::make_discriminator(m, rng);
    cpkit::GeoDistribution x;
    {
        std::int64_t total = 0;
        for (std::int64_t s : demand) total += s;
        x.x.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            x.x[static_cast<std::size_t>(j)] =
                static_cast<double>(demand[static_cast<std::size_t>(j)]) / static_cast<double>(total);
    }

    out << "method,max_replicas,median_us,min_us,max_us\n";
    for (int c : {3, 5, 10, 15}) {
        cpkit::PlacementInstance inst =
            cpkit::make_instance(demand, latency, c, cfg.seed, cfg.capacity_factor);
        const cpkit::TimingStats tg =
            cpkit::bench_decision_time([&] { cpkit::greedy_place(inst); }, reps);
        out << "greedy," << c << ',' << tg.median_us << ',' << tg.min_us << ',' << tg.max_us << '\n';
        const cpkit::TimingStats tc = cpkit::bench_decision_time(
            [&] { cpkit::infer_placement_feasible(disc, x, inst); }, reps);
        out << "cpgan," << c << ',' << tc.median_us << ',' << tc.min_us << ',' << tc.max_us << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"content placement toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    app.add_option("--config", config_path, "key = value config file")->expected(1);
    CLI::Option* seed_opt = app.add_option("--seed", seed, "override config seed");
    app.add_option("--out", out_dir, "artifact directory");

    std::string decide_model, decide_input, decide_instance;
    std::string eval_input_instance;
    int bench_m = 34, bench_reps = 9;

    CLI::App* c_generate = app.add_subcommand("generate", "synthesize a cascade corpus");
    CLI::App* c_extract = app.add_subcommand("extract", "extract per-window features");
    CLI::App* c_tburst = app.add_subcommand("train-burst", "train the burst predictor");
    CLI::App* c_tgeo = app.add_subcommand("train-geo", "train the geo-distribution predictor");
    CLI::App* c_labels = app.add_subcommand("solve-labels", "label bursts with the exact solver");
    CLI::App* c_tgan = app.add_subcommand("train-gan", "train the placement GAN");
    CLI::App* c_decide = app.add_subcommand("decide", "placement decisions for geo distributions");
    CLI::App* c_eval = app.add_subcommand("evaluate", "evaluate all methods on held-out bursts");
    CLI::App* c_bench = app.add_subcommand("bench", "time placement decisions");
    CLI::App* c_pipeline = app.add_subcommand("pipeline", "run all stages in order");

    c_decide->add_option("--model", decide_model, "GAN checkpoint (default <out>/gan_model.txt)");
    c_decide->add_option("--input", decide_input, "distribution file, '-' for stdin");
    c_decide->add_option("--instance", decide_instance,
                         "placement instance file; adds feasibility repair + routing cost");
    c_bench->add_option("--regions", bench_m, "region count");
    c_bench->add_option("--reps", bench_reps, "timed repetitions per grid point");

    CLI11_PARSE(app, argc, argv);

    try {
        const cpkit::PipelineConfig cfg = load_config(config_path, seed, seed_opt->count() > 0);
        cpkit::PipelinePaths paths{out_dir};
        std::filesystem::create_directories(paths.dir);

        if (c_generate->parsed()) {
            cpkit::stage_generate(cfg, paths.corpus());
        } else if (c_extract->parsed()) {
            cpkit::stage_extract(cfg, paths.corpus(), paths.features());
        } else if (c_tburst->parsed()) {
            cpkit::stage_train_burst(cfg, paths.corpus(), paths.burst_model());
        } else if (c_tgeo->parsed()) {
            cpkit::stage_train_geo(cfg, paths.corpus(), paths.burst_model(), paths.geo_model());
        } else if (c_labels->parsed()) {
            cpkit::stage_solve_labels(cfg, paths.corpus(), paths.labels());
        } else if (c_tgan->parsed()) {
            cpkit::stage_train_gan(cfg, paths.corpus(), paths.labels(), paths.gan_model());
        } else if (c_decide->parsed()) {
            run_decide(cfg, decide_model.empty() ? paths.gan_model() : decide_model, decide_input,
                       decide_instance);
        } else if (c_eval->parsed()) {
            cpkit::stage_evaluate(cfg, paths);
        } else if (c_bench->parsed()) {
            run_bench(cfg, bench_m, bench_reps, std::cout);
        } else if (c_pipeline->parsed()) {
            cpkit::run_pipeline(cfg, out_dir);
        }
    } catch (const cpkit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const cpkit::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
