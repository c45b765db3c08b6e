#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "partscape/io.hpp"
#include "partscape/error.hpp"
#include "partscape/kernel.hpp"
#include "partscape/partition.hpp"
#include "partscape/point_set.hpp"
#include "partscape/quality.hpp"
#include "partscape/rng.hpp"

namespace partscape {

struct ChainConfig {
    std::size_t clusters = 2;
    std::size_t burn_in = 1000;
    std::size_t samples = 4000;
    std::size_t thinning = 1;
    std::uint64_t seed = 0;
    QualityKind quality = QualityKind::kernel;
    KernelSpec kernel{};
    // Upper bound on n * s * (burn_in + samples * thinning) candidate evaluations.
    double max_steps = 1e11;

    void validate(std::size_t n) const {
        if (clusters < 2 || clusters > n)
            throw ParameterError("chain needs 2 <= s <= n (s=" + std::to_string(clusters) +
                                 ", n=" + std::to_string(n) + ")");
        if (samples < 1) throw ParameterError("chain needs at least one sample");
        if (thinning < 1) throw ParameterError("thinning must be at least 1");
        kernel.validate();
        const double steps = static_cast<double>(n) * static_cast<double>(clusters) *
                             (static_cast<double>(burn_in) +
                              static_cast<double>(samples) * static_cast<double>(thinning));
        if (steps > max_steps)
            throw ParameterError("chain would take " + std::to_string(steps) +
                                 " candidate evaluations, above the budget of " +
                                 std::to_string(max_steps));
    }
};

/// The sampled collection Z with each member's quality.
struct SampleSet {
    std::size_t points = 0;
    std::size_t clusters = 0;
    double bandwidth = 1.0;
    QualityKind quality = QualityKind::kernel;
    std::uint64_t seed = 0;
    std::vector<Partition> partitions;
    std::vector<double> qualities;

    std::size_t size() const noexcept { return partitions.size(); }
};

/// Resamples the cluster of one point from its exact conditional: candidate j
/// gets weight Q(partition with the point moved to j), normalized over all
/// candidates. Candidates that would empty the point's current cluster are
/// excluded, so a singleton stays put. Returns the chosen cluster.
inline Label gibbs_step(QualityCache& cache, std::size_t point, Rng& rng,
                        std::vector<double>& weights) {
    const std::size_t s = cache.clusters();
    const Label current = cache.label(point);
    weights.assign(s, 0.0);
    if (cache.cluster_size(current) == 1) return current;

    double total = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
        weights[j] = cache.quality_delta(point, static_cast<Label>(j));
        total += weights[j];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericError("all candidate qualities vanished or overflowed at point " +
                           std::to_string(point) + "; rescale the kernel bandwidth");

    double u = rng.uniform() * total;
    Label chosen = static_cast<Label>(s - 1);
    for (std::size_t j = 0; j < s; ++j) {
        if (weights[j] <= 0.0) continue;
        u -= weights[j];
        if (u < 0.0) {
            chosen = static_cast<Label>(j);
            break;
        }
    }
    while (weights[chosen] <= 0.0) --chosen;  // guard against rounding past the last positive weight
    cache.apply_move(point, chosen);
    return chosen;
}

inline Label gibbs_step(QualityCache& cache, std::size_t point, Rng& rng) {
    std::vector<double> weights;
    return gibbs_step(cache, point, rng, weights);
}

/// One sweep: a fresh uniform random order of all points, then one
/// conditional resampling step per point in that order.
inline void gibbs_sweep(QualityCache& cache, Rng& rng, std::vector<std::size_t>& order,
                        std::vector<double>& weights) {
    if (cache.clusters() < 2) throw ParameterError("a Gibbs sweep needs at least 2 clusters");
    order.resize(cache.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t point : order) gibbs_step(cache, point, rng, weights);
}

inline void gibbs_sweep(QualityCache& cache, Rng& rng) {
    std::vector<std::size_t> order;
    std::vector<double> weights;
    gibbs_sweep(cache, rng, order, weights);
}

inline QualityCache make_cache(std::shared_ptr<const PointSet> points, const Partition& start,
                               QualityKind kind, const KernelSpec& kernel) {
    if (kind == QualityKind::kernel)
        return QualityCache::kernel(std::make_shared<const Matrix>(gram_matrix(*points, kernel)), start);
    return QualityCache::kmeans(std::move(points), start);
}

/// Progress callback: (sweeps done, sweeps total).
using ChainProgress = std::function<void(std::size_t, std::size_t)>;

/// Burn-in sweeps, then samples * thinning sweeps keeping every thinning-th
/// state in canonical form together with its quality.
inline SampleSet run_chain(const PointSet& points, const Partition& seed_partition,
                           const ChainConfig& cfg, const ChainProgress& progress = {}) {
    cfg.validate(points.size());
    if (seed_partition.size() != points.size())
        throw DimensionError("seed partition does not cover the point set");
    if (seed_partition.clusters() != cfg.clusters)
        throw ParameterError("seed partition has " + std::to_string(seed_partition.clusters()) +
                             " clusters, chain expects " + std::to_string(cfg.clusters));

    auto shared_points = std::make_shared<const PointSet>(points);
    QualityCache cache = make_cache(shared_points, seed_partition, cfg.quality, cfg.kernel);
    Rng rng(cfg.seed);

    SampleSet out;
    out.points = points.size();
    out.clusters = cfg.clusters;
    out.bandwidth = cfg.kernel.bandwidth;
    out.quality = cfg.quality;
    out.seed = cfg.seed;
    out.partitions.reserve(cfg.samples);
    out.qualities.reserve(cfg.samples);

    const std::size_t total = cfg.burn_in + cfg.samples * cfg.thinning;
    const std::size_t report_every = std::max<std::size_t>(1, total / 100);
    std::vector<std::size_t> order;
    std::vector<double> weights;
    for (std::size_t sweep = 1; sweep <= total; ++sweep) {
        gibbs_sweep(cache, rng, order, weights);
        if (sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.thinning == 0) {
            out.partitions.push_back(canonicalize(cache.partition()));
            out.qualities.push_back(cache.quality());
        }
        if (progress && (sweep % report_every == 0 || sweep == total)) progress(sweep, total);
    }
    return out;
}

/// Concatenates chains run over the same points with the same settings.
inline SampleSet merge_samples(const std::vector<SampleSet>& parts, std::uint64_t master_seed) {
    if (parts.empty()) throw ParameterError("nothing to merge");
    SampleSet out;
    out.points = parts.front().points;
    out.clusters = parts.front().clusters;
    out.bandwidth = parts.front().bandwidth;
    out.quality = parts.front().quality;
    out.seed = master_seed;
    for (const auto& part : parts) {
        if (part.points != out.points || part.clusters != out.clusters ||
            part.bandwidth != out.bandwidth || part.quality != out.quality)
            throw ParameterError("cannot merge sample sets with different settings");
        out.partitions.insert(out.partitions.end(), part.partitions.begin(), part.partitions.end());
        out.qualities.insert(out.qualities.end(), part.qualities.begin(), part.qualities.end());
    }
    return out;
}

// Sample-set file:
//   n s m sigma quality-kind seed
//   <quality> <label_0> ... <label_{n-1}>     (m lines)

inline std::string format_samples(const SampleSet& z) {
    std::ostringstream out;
    out << z.points << ' ' << z.clusters << ' ' << z.size() << ' ' << detail::format_double(z.bandwidth)
        << ' ' << to_string(z.quality) << ' ' << z.seed << '\n';
    for (std::size_t i = 0; i < z.size(); ++i)
        out << detail::format_double(z.qualities[i]) << ' ' << to_line(z.partitions[i]) << '\n';
    return out.str();
}

inline void write_samples(const std::string& path, const SampleSet& z) {
    detail::write_text(path, format_samples(z));
}

inline SampleSet read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "': missing header");
    std::istringstream header(line);
    SampleSet z;
    std::size_t m = 0;
    std::string sigma;
    std::string kind;
    if (!(header >> z.points >> z.clusters >> m >> sigma >> kind >> z.seed))
        throw ParseError("'" + path + "': header must be 'n s m sigma quality-kind seed'");
    const auto bw = detail::parse_double(sigma);
    if (!bw) throw ParseError("'" + path + "': bad sigma '" + sigma + "'");
    z.bandwidth = *bw;
    z.quality = parse_quality_kind(kind);
    z.partitions.reserve(m);
    z.qualities.reserve(m);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::string where = "'" + path + "' line " + std::to_string(line_no);
        const std::size_t space = line.find(' ');
        const auto q = detail::parse_double(std::string_view(line).substr(0, space));
        if (!q || space == std::string::npos) throw ParseError(where + ": bad quality value");
        auto labels = parse_labels(std::string_view(line).substr(space + 1));
        if (labels.size() != z.points)
            throw ParseError(where + ": expected " + std::to_string(z.points) + " labels");
        z.qualities.push_back(*q);
        z.partitions.emplace_back(std::move(labels), z.clusters);
    }
    if (z.partitions.size() != m)
        throw ParseError("'" + path + "': header announces " + std::to_string(m) + " samples, found " +
                         std::to_string(z.partitions.size()));
    return z;
}

}  // namespace partscape
