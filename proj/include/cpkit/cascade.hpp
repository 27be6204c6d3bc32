#ifndef CPKIT_CASCADE_HPP
#define CPKIT_CASCADE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpkit/errors.hpp"
#include "cpkit/rng.hpp"

namespace cpkit {

enum class ContentType : int { Political = 0, Advertising = 1, Other = 2 };

inline const char* to_string(ContentType t) {
    switch (t) {
        case ContentType::Political: return "political";
        case ContentType::Advertising: return "advertising";
        default: return "other";
    }
}

inline ContentType content_type_from_string(const std::string& s) {
    if (s == "political") return ContentType::Political;
    if (s == "advertising") return ContentType::Advertising;
    if (s == "other") return ContentType::Other;
    throw ParseError("unknown content type: " + s);
}

struct Region {
    int id = 0;
    double x = 0.0, y = 0.0; // planar position, abstract distance units
    std::int64_t capacity = 0; // users servable by a replica placed here
};

using RegionSet = std::vector<Region>;

// Symmetric zero-diagonal access-delay matrix in milliseconds.
struct LatencyMatrix {
    int m = 0;
    std::vector<double> l; // row-major m x m

    LatencyMatrix() = default;
    explicit LatencyMatrix(int m_) : m(m_), l(static_cast<std::size_t>(m_) * m_, 0.0) {}

    double& at(int i, int j) { return l[static_cast<std::size_t>(i) * m + j]; }
    double at(int i, int j) const { return l[static_cast<std::size_t>(i) * m + j]; }
};

inline LatencyMatrix latency_from_coords(const RegionSet& regions, double scale_ms_per_unit) {
    LatencyMatrix lm(static_cast<int>(regions.size()));
    for (std::size_t i = 0; i < regions.size(); ++i)
        for (std::size_t j = 0; j < regions.size(); ++j) {
            const double dx = regions[i].x - regions[j].x;
            const double dy = regions[i].y - regions[j].y;
            lm.at(static_cast<int>(i), static_cast<int>(j)) =
                scale_ms_per_unit * std::sqrt(dx * dx + dy * dy);
        }
    return lm;
}

enum class EventKind : char { View = 'V', Reshare = 'R' };

struct CascadeEvent {
    std::int64_t user = 0;
    std::int64_t parent = -1; // -1 marks the root publisher
    EventKind kind = EventKind::View;
    int level = 0;
    std::int64_t t = 0; // seconds since the root post
    int region = 0;
};

struct Cascade {
    std::int64_t content_id = 0;
    ContentType ctype = ContentType::Other;
    std::vector<CascadeEvent> events; // sorted by t; events[0] is the root
    std::int64_t horizon = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(events.size()); }
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    int n_regions = 15;
    // probabilities over {star, split, chain}
    std::array<double, 3> pattern_mix = {0.25, 0.55, 0.20};
    // burst probability per content type, uniform ctype prior over the three classes
    std::map<ContentType, double> ctype_burst_prob = {
        {ContentType::Political, 0.49},
        {ContentType::Advertising, 0.19},
        {ContentType::Other, 0.05}};
    double region_popularity_concentration = 0.3; // Dirichlet alpha of the corpus profile
    double region_popularity_stability = 60.0;    // per-cascade concentration around it
    double mean_branching = 20.0;
    double view_to_reshare_ratio = 7.0; // views per reshare
    std::int64_t horizon = 86400;
    std::int64_t early_phase = 18000; // slow-start phase length in seconds
    std::int64_t burst_threshold = 2000;
};

inline void validate(const GeneratorConfig& cfg) {
    double mix = 0.0;
    for (double p : cfg.pattern_mix) {
        if (p < 0.0 || p > 1.0) throw ConfigError("pattern_mix entries must be in [0,1]");
        mix += p;
    }
    if (std::abs(mix - 1.0) > 1e-9) throw ConfigError("pattern_mix must sum to 1");
    for (const auto& [t, p] : cfg.ctype_burst_prob)
        if (p < 0.0 || p > 1.0) throw ConfigError("burst probabilities must be in [0,1]");
    if (cfg.n_regions < 1) throw ConfigError("n_regions must be >= 1");
    if (cfg.region_popularity_concentration <= 0.0)
        throw ConfigError("region_popularity_concentration must be positive");
    if (cfg.region_popularity_stability <= 0.0)
        throw ConfigError("region_popularity_stability must be positive");
    if (cfg.mean_branching <= 0.0) throw ConfigError("mean_branching must be positive");
    if (cfg.view_to_reshare_ratio <= 0.0) throw ConfigError("view_to_reshare_ratio must be positive");
    if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (cfg.early_phase < 1 || cfg.early_phase >= cfg.horizon)
        throw ConfigError("early_phase must be in [1, horizon)");
    if (cfg.burst_threshold < 1) throw ConfigError("burst_threshold must be >= 1");
}

namespace detail {

inline std::vector<double> dirichlet(Rng& rng, const std::vector<double>& alpha) {
    std::vector<double> w(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::gamma_distribution<double> gamma(alpha[i], 1.0);
        w[i] = gamma(rng);
        total += w[i];
    }
    if (total <= 0.0) { // extreme concentration can underflow every draw
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
        return w;
    }
    for (double& x : w) x /= total;
    return w;
}

inline std::vector<double> dirichlet(Rng& rng, int n, double alpha) {
    return dirichlet(rng, std::vector<double>(static_cast<std::size_t>(n), alpha));
}

} // namespace detail

// Corpus-level region popularity, fixed by the generator seed. Individual
// cascades draw their region mix around this profile, so geo-distributions
// cluster the way stable regional populations make them.
inline std::vector<double> region_popularity(const GeneratorConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, 0x506f7075ULL));
    return detail::dirichlet(rng, cfg.n_regions, cfg.region_popularity_concentration);
}

// One cascade as a pure function of (cfg, index): seeded branching process.
// A pattern picks preferential attachment over reshare nodes (star: mostly the
// root; split: uniform; chain: the deepest), the content type scales burst
// probability, and a per-cascade Dirichlet draw fixes the region mix.
inline Cascade generate_cascade(const GeneratorConfig& cfg, std::int64_t index) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));

    Cascade c;
    c.content_id = index;
    c.horizon = cfg.horizon;
    c.ctype = static_cast<ContentType>(uniform_int(rng, 0, 2));

    const double burst_p = cfg.ctype_burst_prob.count(c.ctype)
                               ? cfg.ctype_burst_prob.at(c.ctype)
                               : 0.0;
    const bool burst = uniform(rng) < burst_p;
    const auto theta = static_cast<double>(cfg.burst_threshold);

    // A slice of each class shares one "slow-start" early trajectory whose
    // outcome is undecidable from counts alone; its class mix depends on the
    // content type (political/advertising slow starters usually explode,
    // other-type ones usually fizzle), so the type carries real signal there.
    static constexpr double kAmbiguousGivenBurst[3] = {0.50, 0.55, 0.25};
    static constexpr double kAmbiguousGivenCalm[3] = {0.12, 0.07, 0.12};
    const double amb_p = burst ? kAmbiguousGivenBurst[static_cast<int>(c.ctype)]
                               : kAmbiguousGivenCalm[static_cast<int>(c.ctype)];
    const bool ambiguous = uniform(rng) < amb_p;

    // Final size: bursting cascades land above the threshold, the rest below,
    // both log-uniform so early-window counts overlap between the classes.
    std::int64_t n = burst
        ? static_cast<std::int64_t>(theta * std::exp(uniform(rng, 0.05, 1.2)))
        : std::max<std::int64_t>(3, static_cast<std::int64_t>(theta * std::exp(uniform(rng, -3.5, -0.05))));

    const int pattern = categorical(rng, cfg.pattern_mix); // 0 star, 1 split, 2 chain
    const std::vector<double> global_w = region_popularity(cfg);
    std::vector<double> mix_alpha(global_w.size());
    for (std::size_t j = 0; j < global_w.size(); ++j)
        mix_alpha[j] = cfg.region_popularity_stability * global_w[j] + 0.02;
    const std::vector<double> region_w = detail::dirichlet(rng, mix_alpha);

    // Temporal profile t(k) = horizon * (k/n)^(1/g); counts grow as t^g, so
    // g > 1 back-loads the growth. Burst and calm exponent ranges overlap.
    const double growth = burst ? uniform(rng, 1.5, 3.0) : uniform(rng, 0.7, 1.8);

    // Slow starters follow a shared piecewise profile instead: a standard
    // early-phase count with a mild class-dependent curvature difference,
    // then the remaining mass after the early phase.
    const auto early_period = static_cast<double>(cfg.early_phase);
    std::int64_t n_early = n;
    double g_early = growth, g_late = growth;
    if (ambiguous) {
        n_early = std::max<std::int64_t>(
            10, static_cast<std::int64_t>(
                    std::exp(uniform(rng, std::log(0.075 * theta), std::log(0.225 * theta)))));
        g_early = burst ? uniform(rng, 1.2, 1.6) : uniform(rng, 1.0, 1.4);
        g_late = uniform(rng, 1.0, 2.0);
        if (!burst) {
            // calm slow starters gain only a modest tail after the early phase
            n = n_early + static_cast<std::int64_t>(
                              static_cast<double>(n_early) * std::exp(uniform(rng, -1.5, 0.4)));
        }
        n = std::max(n, n_early + 1);
    }

    const double reshare_p = 1.0 / (1.0 + cfg.view_to_reshare_ratio);
    const double star_root_p = 1.0 - 1.0 / cfg.mean_branching;

    c.events.reserve(static_cast<std::size_t>(n));
    CascadeEvent root;
    root.user = 0;
    root.parent = -1;
    root.kind = EventKind::Reshare;
    root.level = 0;
    root.t = 0;
    root.region = categorical(rng, region_w);
    c.events.push_back(root);

    std::vector<std::size_t> reshares = {0}; // indices of potential parents

    for (std::int64_t k = 1; k < n; ++k) {
        std::size_t parent_idx;
        switch (pattern) {
            case 0: // star: the root absorbs almost all attachments
                parent_idx = (uniform(rng) < star_root_p || reshares.size() == 1)
                                 ? 0
                                 : reshares[static_cast<std::size_t>(
                                       uniform_int(rng, 1, static_cast<int>(reshares.size()) - 1))];
                break;
            case 2: // chain: always extend the frontier
                parent_idx = reshares.back();
                break;
            default: // split: uniform preferential attachment over reshares
                parent_idx = reshares[static_cast<std::size_t>(
                    uniform_int(rng, 0, static_cast<int>(reshares.size()) - 1))];
                break;
        }
        const CascadeEvent& par = c.events[parent_idx];

        CascadeEvent ev;
        ev.user = k;
        ev.parent = par.user;
        ev.kind = uniform(rng) < reshare_p ? EventKind::Reshare : EventKind::View;
        ev.level = par.level + 1;
        double t;
        if (!ambiguous) {
            t = static_cast<double>(cfg.horizon) *
                std::pow(static_cast<double>(k) / static_cast<double>(n), 1.0 / growth);
        } else if (k < n_early) {
            t = early_period *
                std::pow(static_cast<double>(k) / static_cast<double>(n_early), 1.0 / g_early);
        } else {
            t = early_period + static_cast<double>(cfg.horizon - cfg.early_phase) *
                                   std::pow(static_cast<double>(k - n_early) /
                                                static_cast<double>(n - n_early),
                                            1.0 / g_late);
        }
        ev.t = std::max<std::int64_t>(par.t, static_cast<std::int64_t>(t));
        ev.region = categorical(rng, region_w);
        c.events.push_back(ev);
        if (ev.kind == EventKind::Reshare)
            reshares.push_back(c.events.size() - 1);
    }

    std::stable_sort(c.events.begin(), c.events.end(),
                     [](const CascadeEvent& a, const CascadeEvent& b) { return a.t < b.t; });
    return c;
}

inline std::vector<Cascade> generate_corpus(const GeneratorConfig& cfg, std::int64_t n_cascades) {
    validate(cfg);
    if (n_cascades < 1) throw ConfigError("n_cascades must be >= 1");
    std::vector<Cascade> corpus;
    corpus.reserve(static_cast<std::size_t>(n_cascades));
    for (std::int64_t i = 0; i < n_cascades; ++i)
        corpus.push_back(generate_cascade(cfg, i));
    return corpus;
}

// Deterministic region layout for a corpus: coordinates uniform in [0,100]^2.
inline RegionSet make_regions(std::uint64_t seed, int n_regions) {
    Rng rng(derive_seed(seed, 0x5265676eULL));
    RegionSet rs(static_cast<std::size_t>(n_regions));
    for (int i = 0; i < n_regions; ++i) {
        rs[i].id = i;
        rs[i].x = uniform(rng, 0.0, 100.0);
        rs[i].y = uniform(rng, 0.0, 100.0);
    }
    return rs;
}

// ---- corpus file format -------------------------------------------------
// One header line per cascade:
//   #cascade <content_id> <ctype> <horizon>
// followed by one line per event:
//   <user> <parent> <kind:V|R> <level> <t> <region>
// The root event carries parent -1.

inline void validate_cascade(const Cascade& c, const std::string& where) {
    if (c.events.empty()) throw ValidationError(where + ": cascade has no events");
    std::unordered_map<std::int64_t, const CascadeEvent*> by_user;
    int roots = 0;
    std::int64_t prev_t = 0;
    for (const CascadeEvent& ev : c.events) {
        if (ev.t < prev_t) throw ValidationError(where + ": events not sorted by t");
        prev_t = ev.t;
        if (!by_user.emplace(ev.user, &ev).second)
            throw ValidationError(where + ": duplicate user id " + std::to_string(ev.user));
        if (ev.parent == -1) {
            if (ev.level != 0) throw ValidationError(where + ": root level must be 0");
            ++roots;
        }
    }
    if (roots != 1) throw ValidationError(where + ": cascade must have exactly one root");
    for (const CascadeEvent& ev : c.events) {
        if (ev.parent == -1) continue;
        auto it = by_user.find(ev.parent);
        if (it == by_user.end())
            throw ValidationError(where + ": unknown parent " + std::to_string(ev.parent));
        const CascadeEvent& par = *it->second;
        if (par.kind != EventKind::Reshare)
            throw ValidationError(where + ": parent " + std::to_string(ev.parent) +
                                  " is a view and cannot expose others");
        if (ev.level != par.level + 1)
            throw ValidationError(where + ": level must be parent level + 1");
        if (ev.t < par.t) throw ValidationError(where + ": event precedes its parent");
    }
}

inline void write_corpus(std::ostream& out, const std::vector<Cascade>& corpus) {
    for (const Cascade& c : corpus) {
        out << "#cascade " << c.content_id << ' ' << to_string(c.ctype) << ' ' << c.horizon << '\n';
        for (const CascadeEvent& ev : c.events)
            out << ev.user << ' ' << ev.parent << ' ' << static_cast<char>(ev.kind) << ' '
                << ev.level << ' ' << ev.t << ' ' << ev.region << '\n';
    }
}

inline void write_corpus(const std::string& path, const std::vector<Cascade>& corpus) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    write_corpus(out, corpus);
}

inline std::vector<Cascade> read_corpus(std::istream& in) {
    std::vector<Cascade> corpus;
    std::string line;
    std::int64_t lineno = 0;
    auto flush = [&](Cascade& c) {
        if (c.events.empty() && c.content_id == -1) return;
        validate_cascade(c, "cascade " + std::to_string(c.content_id));
        corpus.push_back(std::move(c));
    };
    Cascade cur;
    cur.content_id = -1;
    bool open = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string tag, ctype;
            if (open) flush(cur);
            cur = Cascade{};
            if (!(ls >> tag >> cur.content_id >> ctype >> cur.horizon) || tag != "#cascade")
                throw ParseError("line " + std::to_string(lineno) + ": bad cascade header");
            cur.ctype = content_type_from_string(ctype);
            open = true;
        } else {
            if (!open)
                throw ParseError("line " + std::to_string(lineno) + ": event before any header");
            CascadeEvent ev;
            char kind;
            if (!(ls >> ev.user >> ev.parent >> kind >> ev.level >> ev.t >> ev.region) ||
                (kind != 'V' && kind != 'R'))
                throw ParseError("line " + std::to_string(lineno) + ": bad event record");
            ev.kind = static_cast<EventKind>(kind);
            cur.events.push_back(ev);
        }
    }
    if (open) flush(cur);
    return corpus;
}

inline std::vector<Cascade> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open for reading: " + path);
    return read_corpus(in);
}

} // namespace cpkit

#endif
