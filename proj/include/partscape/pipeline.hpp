#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partscape/dataset.hpp"
#include "partscape/error.hpp"
#include "partscape/grouping.hpp"
#include "partscape/io.hpp"
#include "partscape/kernel.hpp"
#include "partscape/pdist.hpp"
#include "partscape/report.hpp"
#include "partscape/rng.hpp"
#include "partscape/sampler.hpp"

namespace partscape {

inline constexpr const char* version = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw NumericError("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Every setting of a run. Keys and defaults follow the experiment protocol:
/// 1000 burn-in sweeps, 4000 kept samples, 10 representatives.
struct RunConfig {
    std::string csv;                        // dataset path (exclusive with synthetic)
    std::optional<std::size_t> label_col;   // reference label column in csv
    std::string synthetic;                  // "2d5c"
    std::size_t s = 5;
    std::string sigma = "median";           // "median" or a positive number
    std::string quality = "kernel";
    std::size_t t0 = 1000;
    std::size_t m = 4000;
    std::size_t thinning = 1;
    std::size_t chains = 1;
    std::string distance = "liftemd";
    std::size_t k = 10;
    std::string first = "quality";          // "quality" or a sample index
    std::uint64_t seed = 0;
    std::size_t bins = 40;
    std::optional<double> baseline;         // external consensus quality ratio marker
    std::string out = "runs";               // not part of the config hash
    std::size_t threads = 0;                // 0 = hardware; not part of the hash

    static const std::vector<std::pair<std::string, std::string>>& keys() {
        static const std::vector<std::pair<std::string, std::string>> k = {
            {"csv", "input CSV path (exclusive with synthetic)"},
            {"label_col", "0-based column of reference labels in the CSV"},
            {"synthetic", "synthetic dataset name: 2d5c"},
            {"s", "clusters per partition"},
            {"sigma", "Gaussian kernel bandwidth, or 'median' for the median heuristic"},
            {"quality", "partition quality: kernel | kmeans"},
            {"t0", "burn-in sweeps per chain"},
            {"m", "kept samples in total"},
            {"thinning", "sweeps between kept samples"},
            {"chains", "independent chains; samples are split evenly"},
            {"distance", "grouping distance: liftemd | vi | rand | nmi | density(<base>)"},
            {"k", "number of representative partitions"},
            {"first", "first k-center: 'quality' (best sample) or a sample index"},
            {"seed", "master RNG seed"},
            {"bins", "histogram bins in the report"},
            {"baseline", "optional consensus quality ratio drawn as a marker"},
            {"out", "output root; runs go to <out>/<config hash>"},
            {"threads", "worker threads for distance matrices (0 = all cores)"},
        };
        return k;
    }

    void set(const std::string& key, const std::string& value) {
        auto to_size = [&](const std::string& v) -> std::size_t {
            const auto d = detail::parse_double(v);
            if (!d || *d < 0 || *d != static_cast<double>(static_cast<std::uint64_t>(*d)))
                throw ParameterError("'" + key + "' needs a nonnegative integer, got '" + v + "'");
            return static_cast<std::size_t>(*d);
        };
        if (key == "csv") csv = value;
        else if (key == "label_col") label_col = value.empty() ? std::nullopt : std::optional(to_size(value));
        else if (key == "synthetic") synthetic = value;
        else if (key == "s") s = to_size(value);
        else if (key == "sigma") sigma = value;
        else if (key == "quality") quality = value;
        else if (key == "t0") t0 = to_size(value);
        else if (key == "m") m = to_size(value);
        else if (key == "thinning") thinning = to_size(value);
        else if (key == "chains") chains = to_size(value);
        else if (key == "distance") distance = value;
        else if (key == "k") k = to_size(value);
        else if (key == "first") first = value;
        else if (key == "seed") {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || ptr != value.data() + value.size())
                throw ParameterError("'seed' needs an unsigned integer, got '" + value + "'");
            seed = v;
        } else if (key == "bins") bins = to_size(value);
        else if (key == "baseline") {
            if (value.empty()) baseline.reset();
            else {
                const auto v = detail::parse_double(value);
                if (!v) throw ParameterError("'baseline' needs a number, got '" + value + "'");
                baseline = *v;
            }
        } else if (key == "out") out = value;
        else if (key == "threads") threads = to_size(value);
        else throw ParameterError("unknown configuration key '" + key + "'");
    }

    /// Reads `key = value` lines; '#' starts a comment.
    static std::map<std::string, std::string> parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config '" + path + "'");
        std::map<std::string, std::string> out;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto text = detail::trim(line);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string_view::npos)
                throw ParameterError("config '" + path + "' line " + std::to_string(line_no) + ": expected key = value");
            out[std::string(detail::trim(text.substr(0, eq)))] = std::string(detail::trim(text.substr(eq + 1)));
        }
        return out;
    }

    /// Canonical `key=value` lines, sorted by key, excluding out and threads.
    std::string canonical() const {
        std::map<std::string, std::string> kv = {
            {"csv", csv},
            {"label_col", label_col ? std::to_string(*label_col) : ""},
            {"synthetic", synthetic},
            {"s", std::to_string(s)},
            {"sigma", sigma},
            {"quality", quality},
            {"t0", std::to_string(t0)},
            {"m", std::to_string(m)},
            {"thinning", std::to_string(thinning)},
            {"chains", std::to_string(chains)},
            {"distance", distance},
            {"k", std::to_string(k)},
            {"first", first},
            {"seed", std::to_string(seed)},
            {"bins", std::to_string(bins)},
            {"baseline", baseline ? detail::format_double(*baseline) : ""},
        };
        std::string text;
        for (const auto& [key, value] : kv) text += key + "=" + value + "\n";
        return text;
    }

    std::string hash() const { return sha256_hex(canonical()).substr(0, 16); }

    void validate() const {
        if (csv.empty() == synthetic.empty()) throw ParameterError("set exactly one of csv or synthetic");
        if (!synthetic.empty() && synthetic != "2d5c")
            throw ParameterError("unknown synthetic dataset '" + synthetic + "' (2d5c)");
        if (s < 2) throw ParameterError("s must be at least 2");
        if (m < 1) throw ParameterError("m must be at least 1");
        if (thinning < 1) throw ParameterError("thinning must be at least 1");
        if (chains < 1 || chains > m) throw ParameterError("chains must be between 1 and m");
        if (k < 1 || k > m) throw ParameterError("k must be between 1 and m");
        if (bins < 1) throw ParameterError("bins must be at least 1");
        parse_quality_kind(quality);
        DistanceSpec::parse(distance);
        if (sigma != "median") {
            const auto v = detail::parse_double(sigma);
            if (!v || !(*v > 0.0)) throw ParameterError("sigma must be 'median' or a positive number");
        }
        if (first != "quality") {
            const auto v = detail::parse_double(first);
            if (!v || *v < 0 || *v >= static_cast<double>(m))
                throw ParameterError("first must be 'quality' or a sample index below m");
        }
    }
};

/// Settings of the generation step.
struct SampleParams {
    std::size_t s = 5;
    std::optional<double> sigma;  // empty: median heuristic
    QualityKind quality = QualityKind::kernel;
    std::size_t t0 = 1000;
    std::size_t m = 4000;
    std::size_t thinning = 1;
    std::size_t chains = 1;
    std::uint64_t seed = 0;
};

// Child streams of the master seed.
inline std::uint64_t kmeans_stream_seed(std::uint64_t master) { return Rng(master).split(1).next(); }
inline std::uint64_t bandwidth_stream_seed(std::uint64_t master) { return Rng(master).split(2).next(); }
inline std::uint64_t chain_stream_seed(std::uint64_t master, std::size_t chain) {
    return Rng(master).split(100 + chain).next();
}

using Logger = std::function<void(const std::string&)>;

/// k-means seed partition, bandwidth, then one or more Gibbs chains whose
/// samples are concatenated. Chain c keeps m/c samples (remainder to the first chains).
inline SampleSet generate_samples(const PointSet& points, const SampleParams& p, const Logger& log = {}) {
    if (p.chains < 1 || p.chains > p.m) throw ParameterError("chains must be between 1 and m");
    const Partition start = kmeans_seed(points, p.s, kmeans_stream_seed(p.seed));
    const double sigma = p.sigma ? *p.sigma : median_bandwidth(points, bandwidth_stream_seed(p.seed));
    if (log) log("bandwidth sigma = " + detail::format_double(sigma));

    std::vector<SampleSet> parts;
    for (std::size_t c = 0; c < p.chains; ++c) {
        ChainConfig cfg;
        cfg.clusters = p.s;
        cfg.burn_in = p.t0;
        cfg.samples = p.m / p.chains + (c < p.m % p.chains ? 1 : 0);
        cfg.thinning = p.thinning;
        cfg.seed = chain_stream_seed(p.seed, c);
        cfg.quality = p.quality;
        cfg.kernel = KernelSpec{sigma};
        ChainProgress progress;
        if (log)
            progress = [&, c](std::size_t done, std::size_t total) {
                if (done == total || done % (total / 10 + 1) == 0)
                    log("chain " + std::to_string(c) + ": sweep " + std::to_string(done) + "/" + std::to_string(total));
            };
        parts.push_back(run_chain(points, start, cfg, progress));
    }
    return merge_samples(parts, p.seed);
}

inline std::size_t resolve_first(const std::string& rule, const SampleSet& z) {
    if (rule == "quality") return best_quality_index(z.qualities);
    const auto v = detail::parse_double(rule);
    if (!v || *v < 0 || *v >= static_cast<double>(z.size()))
        throw ParameterError("first center must be 'quality' or a sample index below " + std::to_string(z.size()));
    return static_cast<std::size_t>(*v);
}

/// Reference for quality ratios: the dataset labels, or the k-means seed
/// partition when the dataset has none.
inline Partition reference_partition(const Dataset& data, const SampleSet& z) {
    if (data.reference) return *data.reference;
    return kmeans_seed(data.points, z.clusters, kmeans_stream_seed(z.seed));
}

/// Figures from the stage artifacts; returns the written paths.
inline std::vector<std::string> build_report(const Dataset& data, const SampleSet& z, const DistanceMatrix& d,
                                             const GroupingResult& g, const Landscape& l, std::size_t bins,
                                             std::optional<double> baseline, const std::string& out_dir) {
    ReportInputs in;
    in.distances = &d;
    in.grouping = &g;
    in.landscape = &l;
    in.ratios = quality_ratio_series(z.partitions, reference_partition(data, z), data.points, KernelSpec{z.bandwidth});
    in.baseline = baseline;
    in.bins = bins;
    return emit_report(in, out_dir);
}

/// File names inside a run directory.
namespace run_files {
inline constexpr const char* dataset = "dataset.csv";
inline constexpr const char* samples = "samples.txt";
inline constexpr const char* distances = "distances.csv";
inline constexpr const char* grouping = "grouping.txt";
inline constexpr const char* summary = "grouping_summary.csv";
inline constexpr const char* landscape = "mds.csv";
inline constexpr const char* figures = "figures";
inline constexpr const char* manifest = "manifest.txt";
}  // namespace run_files

/// Reads a dataset written by write_csv; a trailing "label" header column is
/// taken as the reference partition.
inline Dataset load_run_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string header;
    std::getline(in, header);
    const auto cells = detail::split_commas(header);
    if (!cells.empty() && detail::trim(cells.back()) == "label") return load_csv(path, cells.size() - 1);
    return load_csv(path, std::nullopt);
}

inline SampleParams sample_params(const RunConfig& cfg) {
    SampleParams sp;
    sp.s = cfg.s;
    if (cfg.sigma != "median") sp.sigma = detail::parse_double(cfg.sigma);
    sp.quality = parse_quality_kind(cfg.quality);
    sp.t0 = cfg.t0;
    sp.m = cfg.m;
    sp.thinning = cfg.thinning;
    sp.chains = cfg.chains;
    sp.seed = cfg.seed;
    return sp;
}

// Stages. Each reads its inputs from files and writes its outputs to files,
// returning the paths written.

inline std::vector<std::string> stage_synth(const RunConfig& cfg, const std::string& out) {
    const Dataset data = cfg.synthetic.empty() ? load_csv(cfg.csv, cfg.label_col) : generate_2d5c(cfg.seed);
    write_csv(out, data.points, data.reference);
    return {out};
}

inline std::vector<std::string> stage_sample(const RunConfig& cfg, const std::string& dataset, const std::string& out,
                                             const Logger& log = {}) {
    write_samples(out, generate_samples(load_run_dataset(dataset).points, sample_params(cfg), log));
    return {out};
}

inline std::vector<std::string> stage_dist(const RunConfig& cfg, const std::string& dataset,
                                           const std::string& samples, const std::string& out,
                                           const Logger& log = {}) {
    const Dataset data = load_run_dataset(dataset);
    const SampleSet z = read_samples(samples);
    if (z.points != data.points.size()) throw DimensionError("sample set does not match the dataset size");
    if (log) log("distance matrix (" + cfg.distance + ") over " + std::to_string(z.size()) + " samples");
    const std::size_t threads = cfg.threads ? cfg.threads : detail::default_threads();
    write_distance_matrix(out, pairwise_matrix(z.partitions, DistanceSpec::parse(cfg.distance), data.points,
                                               KernelSpec{z.bandwidth}, threads));
    return {out};
}

inline std::vector<std::string> stage_group(const RunConfig& cfg, const std::string& samples,
                                            const std::string& distances, const std::string& out,
                                            const std::string& summary_out) {
    const SampleSet z = read_samples(samples);
    const DistanceMatrix d = read_distance_matrix(distances);
    if (d.size() != z.size()) throw DimensionError("distance matrix does not match the sample set");
    const GroupingResult g = gonzalez_kcenter(d, cfg.k, resolve_first(cfg.first, z));
    write_grouping(out, g);
    write_grouping_summary(summary_out, summarize_grouping(d, g));
    return {out, summary_out};
}

inline std::vector<std::string> stage_mds(const std::string& distances, const std::string& grouping,
                                          const std::string& out) {
    write_landscape(out, landscape(read_distance_matrix(distances), read_grouping(grouping)));
    return {out};
}

inline std::vector<std::string> stage_report(const RunConfig& cfg, const std::string& dataset,
                                             const std::string& samples, const std::string& distances,
                                             const std::string& grouping, const std::string& mds,
                                             const std::string& out_dir) {
    const Dataset data = load_run_dataset(dataset);
    const SampleSet z = read_samples(samples);
    const DistanceMatrix d = read_distance_matrix(distances);
    const GroupingResult g = read_grouping(grouping);
    const Landscape l = read_landscape(mds);
    if (d.size() != z.size() || g.assignment.size() != z.size())
        throw DimensionError("report inputs disagree on the number of samples");
    return build_report(data, z, d, g, l, cfg.bins, cfg.baseline, out_dir);
}

struct RunResult {
    std::string directory;
    std::string manifest_hash;
};

/// Full generate-then-group run in <out>/<config hash>/. Stages hand off
/// through files, so the result equals running the stage subcommands in turn.
inline RunResult run_pipeline(const RunConfig& cfg, const Logger& log = {}) {
    cfg.validate();
    namespace fs = std::filesystem;
    const std::string hash = cfg.hash();
    const fs::path dir = fs::path(cfg.out) / hash;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create run directory '" + dir.string() + "'");
    auto path = [&](const char* name) { return (dir / name).string(); };

    std::vector<std::string> produced;
    std::string status = "ok";
    auto write_manifest = [&] {
        std::ostringstream out;
        out << "partscape-manifest 1\nversion " << version << "\nconfig_hash " << hash << '\n';
        std::istringstream canon(cfg.canonical());
        for (std::string line; std::getline(canon, line);) out << "config " << line << '\n';
        out << "status " << status << '\n';
        for (const auto& file : produced)
            out << "file " << fs::relative(file, dir).generic_string() << " sha256 " << sha256_hex(read_file(file))
                << '\n';
        detail::write_text(path(run_files::manifest), out.str());
    };
    auto add = [&](std::vector<std::string> files) { produced.insert(produced.end(), files.begin(), files.end()); };

    std::string stage;
    try {
        stage = "synth";
        add(stage_synth(cfg, path(run_files::dataset)));
        stage = "sample";
        add(stage_sample(cfg, path(run_files::dataset), path(run_files::samples), log));
        stage = "dist";
        add(stage_dist(cfg, path(run_files::dataset), path(run_files::samples), path(run_files::distances), log));
        stage = "group";
        add(stage_group(cfg, path(run_files::samples), path(run_files::distances), path(run_files::grouping),
                        path(run_files::summary)));
        stage = "mds";
        add(stage_mds(path(run_files::distances), path(run_files::grouping), path(run_files::landscape)));
        stage = "report";
        add(stage_report(cfg, path(run_files::dataset), path(run_files::samples), path(run_files::distances),
                         path(run_files::grouping), path(run_files::landscape), path(run_files::figures)));
    } catch (Error& e) {
        e.set_stage(stage);
        status = "failed stage=" + stage + " error=" + e.what();
        write_manifest();
        throw;
    }
    write_manifest();
    return {dir.string(), sha256_hex(read_file(path(run_files::manifest)))};
}

}  // namespace partscape
