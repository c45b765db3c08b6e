#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/kernel.hpp"
#include "partscape/matrix.hpp"
#include "partscape/partition.hpp"
#include "partscape/point_set.hpp"

namespace partscape {

enum class QualityKind { kernel, kmeans };

inline std::string_view to_string(QualityKind kind) noexcept {
    return kind == QualityKind::kernel ? "kernel" : "kmeans";
}

inline QualityKind parse_quality_kind(std::string_view text) {
    if (text == "kernel") return QualityKind::kernel;
    if (text == "kmeans") return QualityKind::kmeans;
    throw ParameterError("unknown quality kind '" + std::string(text) + "' (kernel|kmeans)");
}

/// Guard added to the total squared deviation before inverting it.
inline constexpr double kmeans_epsilon = 1e-12;

namespace detail {
inline void check_cover(const Partition& p, const PointSet& points) {
    if (p.size() != points.size())
        throw DimensionError("partition covers " + std::to_string(p.size()) +
                             " points but the point set has " + std::to_string(points.size()));
}
}  // namespace detail

/// Sum over clusters of the within-cluster kernel mass sum_{x,x' in X_j} K(x, x').
inline double kernel_quality(const Partition& p, const Matrix& gram) {
    double total = 0.0;
    for (const auto& cluster : p.members()) {
        double mass = 0.0;
        for (std::size_t a : cluster)
            for (std::size_t b : cluster) mass += gram(a, b);
        total += mass;
    }
    return total;
}

inline double kernel_quality(const Partition& p, const PointSet& points, const KernelSpec& kernel) {
    detail::check_cover(p, points);
    kernel.validate();
    double total = 0.0;
    for (const auto& cluster : p.members()) {
        double mass = 0.0;
        for (std::size_t a : cluster)
            for (std::size_t b : cluster) mass += kernel(points[a], points[b]);
        total += mass;
    }
    return total;
}

/// Total squared deviation of every point from its cluster mean.
inline double within_cluster_ssq(const Partition& p, const PointSet& points) {
    detail::check_cover(p, points);
    const std::size_t d = points.dim();
    Matrix means(p.clusters(), d);
    const auto sizes = p.cluster_sizes();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t k = 0; k < d; ++k) means(p[i], k) += points[i][k];
    for (std::size_t c = 0; c < p.clusters(); ++c)
        for (std::size_t k = 0; k < d; ++k) means(c, k) /= static_cast<double>(sizes[c]);
    double ssq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) ssq += squared_distance(points[i], means.row(p[i]));
    return ssq;
}

/// Inverse total within-cluster squared deviation, 1 / (eps + SSQ).
inline double kmeans_quality(const Partition& p, const PointSet& points) {
    return 1.0 / (kmeans_epsilon + within_cluster_ssq(p, points));
}

inline double quality(const Partition& p, const PointSet& points, QualityKind kind,
                      const KernelSpec& kernel) {
    return kind == QualityKind::kernel ? kernel_quality(p, points, kernel)
                                       : kmeans_quality(p, points);
}

/// Mutable partition plus the running totals needed to score single-point
/// moves without a full recomputation.
///
/// Kernel quality keeps, for every point i and cluster c, the kernel mass
/// between i and the members of c, together with each cluster's self mass;
/// a candidate move is then O(s) and an applied move O(n).
/// K-means quality keeps per-cluster means and squared deviations, updated
/// with Welford's add/remove recurrences; moves are O(d).
class QualityCache {
public:
    static QualityCache kernel(std::shared_ptr<const Matrix> gram, const Partition& start) {
        if (!gram || gram->rows() != start.size() || gram->cols() != start.size())
            throw DimensionError("gram matrix does not match the partition size");
        QualityCache cache(QualityKind::kernel, start);
        cache.gram_ = std::move(gram);
        cache.rebuild();
        return cache;
    }

    static QualityCache kmeans(std::shared_ptr<const PointSet> points, const Partition& start) {
        if (!points) throw ParameterError("k-means quality cache needs a point set");
        detail::check_cover(start, *points);
        QualityCache cache(QualityKind::kmeans, start);
        cache.points_ = std::move(points);
        cache.rebuild();
        return cache;
    }

    QualityKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t clusters() const noexcept { return sizes_.size(); }
    Label label(std::size_t point) const noexcept { return labels_[point]; }
    std::size_t cluster_size(Label c) const noexcept { return sizes_[c]; }
    std::span<const Label> labels() const noexcept { return labels_; }
    Partition partition() const { return Partition(labels_, sizes_.size()); }
    std::uint64_t checksum() const noexcept { return checksum_; }

    double quality() const noexcept {
        double total = 0.0;
        for (double t : totals_) total += t;
        return finish(total);
    }

    /// Quality of the partition obtained by moving `point` to `target`,
    /// leaving the cache untouched. Moving to the current cluster returns
    /// quality() exactly.
    double quality_delta(std::size_t point, Label target) const {
        check_move(point, target);
        const Label source = labels_[point];
        if (target == source) return quality();
        const auto [source_total, target_total] = moved_totals(point, source, target);
        double total = 0.0;
        for (std::size_t c = 0; c < totals_.size(); ++c)
            total += c == source ? source_total : c == target ? target_total : totals_[c];
        return finish(total);
    }

    void apply_move(std::size_t point, Label target) {
        check_move(point, target);
        const Label source = labels_[point];
        if (target == source) return;
        if (sizes_[source] == 1)
            throw EmptyClusterError("moving point " + std::to_string(point) +
                                    " would empty cluster " + std::to_string(source));

        if (kind_ == QualityKind::kernel) {
            const auto [source_total, target_total] = moved_totals(point, source, target);
            totals_[source] = source_total;
            totals_[target] = target_total;
            const std::size_t s = sizes_.size();
            const double* g = gram_->row(point).data();
            double* sums = sums_.data().data();
            for (std::size_t i = 0; i < labels_.size(); ++i) {
                sums[i * s + source] -= g[i];
                sums[i * s + target] += g[i];
            }
        } else {
            const auto x = (*points_)[point];
            remove_from_mean(source, x);
            add_to_mean(target, x);
        }

        --sizes_[source];
        ++sizes_[target];
        checksum_ -= label_hash(point, source);
        checksum_ += label_hash(point, target);
        labels_[point] = target;
    }

    /// Recomputes every cached total from scratch and throws ConsistencyError
    /// if the assignment checksum or any total has drifted beyond
    /// `relative_tolerance`.
    void verify(double relative_tolerance = 1e-9) const {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < labels_.size(); ++i) sum += label_hash(i, labels_[i]);
        if (sum != checksum_) throw ConsistencyError("quality cache assignment checksum mismatch");

        QualityCache fresh = *this;
        fresh.rebuild();
        const double scale = std::max(std::abs(fresh.quality_total()), 1e-300);
        for (std::size_t c = 0; c < totals_.size(); ++c)
            if (std::abs(totals_[c] - fresh.totals_[c]) > relative_tolerance * scale)
                throw ConsistencyError("cached total for cluster " + std::to_string(c) + " drifted");
        const double q = quality();
        const double expected = fresh.quality();
        if (std::abs(q - expected) > relative_tolerance * std::abs(expected))
            throw ConsistencyError("cached quality drifted from recomputation");
    }

private:
    QualityCache(QualityKind kind, const Partition& start)
        : kind_(kind), labels_(start.labels().begin(), start.labels().end()),
          sizes_(start.cluster_sizes()) {
        for (std::size_t i = 0; i < labels_.size(); ++i) checksum_ += label_hash(i, labels_[i]);
    }

    static std::uint64_t label_hash(std::size_t point, Label label) noexcept {
        std::uint64_t z = (static_cast<std::uint64_t>(point) << 32) ^ label;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    void check_move(std::size_t point, Label target) const {
        if (point >= labels_.size())
            throw ParameterError("point index " + std::to_string(point) + " out of range");
        if (target >= sizes_.size())
            throw ParameterError("target cluster " + std::to_string(target) + " out of range");
    }

    double finish(double total) const noexcept {
        return kind_ == QualityKind::kernel ? total : 1.0 / (kmeans_epsilon + total);
    }

    double quality_total() const noexcept {
        double total = 0.0;
        for (double t : totals_) total += t;
        return total;
    }

    // New per-cluster totals for source and target after moving `point`.
    std::pair<double, double> moved_totals(std::size_t point, Label source, Label target) const {
        if (kind_ == QualityKind::kernel) {
            const double self = (*gram_)(point, point);
            const double source_total = totals_[source] - 2.0 * sums_(point, source) + self;
            const double target_total = totals_[target] + 2.0 * sums_(point, target) + self;
            return {source_total, target_total};
        }
        const auto x = (*points_)[point];
        const auto ns = static_cast<double>(sizes_[source]);
        const auto nt = static_cast<double>(sizes_[target]);
        const double source_total =
            sizes_[source] > 1
                ? std::max(0.0, totals_[source] - ns / (ns - 1.0) * squared_distance(x, means_.row(source)))
                : 0.0;
        const double target_total =
            totals_[target] + nt / (nt + 1.0) * squared_distance(x, means_.row(target));
        return {source_total, target_total};
    }

    void add_to_mean(Label c, std::span<const double> x) {
        auto mean = means_.row(c);
        const double count = static_cast<double>(sizes_[c] + 1);
        double m2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double delta = x[k] - mean[k];
            mean[k] += delta / count;
            m2 += delta * (x[k] - mean[k]);
        }
        totals_[c] += m2;
    }

    void remove_from_mean(Label c, std::span<const double> x) {
        auto mean = means_.row(c);
        const double count = static_cast<double>(sizes_[c] - 1);
        double m2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double delta = x[k] - mean[k];
            mean[k] -= delta / count;
            m2 += delta * (x[k] - mean[k]);
        }
        totals_[c] = std::max(0.0, totals_[c] - m2);
    }

    void rebuild() {
        const std::size_t n = labels_.size();
        const std::size_t s = sizes_.size();
        totals_.assign(s, 0.0);
        if (kind_ == QualityKind::kernel) {
            sums_ = Matrix(n, s);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) sums_(i, labels_[j]) += (*gram_)(i, j);
            for (std::size_t i = 0; i < n; ++i) totals_[labels_[i]] += sums_(i, labels_[i]);
        } else {
            const std::size_t d = points_->dim();
            means_ = Matrix(s, d);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < d; ++k) means_(labels_[i], k) += (*points_)[i][k];
            for (std::size_t c = 0; c < s; ++c)
                for (std::size_t k = 0; k < d; ++k) means_(c, k) /= static_cast<double>(sizes_[c]);
            for (std::size_t i = 0; i < n; ++i)
                totals_[labels_[i]] += squared_distance((*points_)[i], means_.row(labels_[i]));
        }
    }

    QualityKind kind_;
    std::vector<Label> labels_;
    std::vector<std::size_t> sizes_;
    std::vector<double> totals_;  // kernel: cluster self mass; kmeans: cluster SSQ
    std::uint64_t checksum_ = 0;

    std::shared_ptr<const Matrix> gram_;
    Matrix sums_;  // n x s kernel mass between point and cluster

    std::shared_ptr<const PointSet> points_;
    Matrix means_;  // s x d
};

}  // namespace partscape
