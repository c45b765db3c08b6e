#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "partscape/error.hpp"

namespace partscape {

using Label = std::uint32_t;

/// Assignment of n points to s nonempty clusters labelled 0..s-1.
///
/// Labels are not required to be canonical; equality compares canonical
/// forms, so two partitions that differ only by a relabeling are equal.
class Partition {
public:
    Partition(std::vector<Label> labels, std::size_t clusters)
        : labels_(std::move(labels)), clusters_(clusters) {
        validate();
    }

    /// Cluster count inferred as max label + 1.
    explicit Partition(std::vector<Label> labels) : labels_(std::move(labels)) {
        clusters_ = labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end()) + 1u;
        validate();
    }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t clusters() const noexcept { return clusters_; }
    Label operator[](std::size_t i) const noexcept { return labels_[i]; }
    std::span<const Label> labels() const noexcept { return labels_; }

    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> sizes(clusters_, 0);
        for (Label l : labels_) ++sizes[l];
        return sizes;
    }

    /// Member indices of every cluster, ascending within a cluster.
    std::vector<std::vector<std::size_t>> members() const {
        std::vector<std::vector<std::size_t>> out(clusters_);
        for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
        return out;
    }

    bool is_canonical() const noexcept {
        Label next = 0;
        for (Label l : labels_) {
            if (l > next) return false;
            if (l == next) ++next;
        }
        return true;
    }

    friend bool operator==(const Partition& a, const Partition& b);

private:
    void validate() const {
        if (labels_.empty()) throw InvariantError("partition over zero points");
        if (clusters_ == 0) throw InvariantError("partition with zero clusters");
        std::vector<bool> seen(clusters_, false);
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] >= clusters_)
                throw InvariantError("label " + std::to_string(labels_[i]) + " at point " +
                                     std::to_string(i) + " outside 0.." +
                                     std::to_string(clusters_ - 1));
            seen[labels_[i]] = true;
        }
        for (std::size_t c = 0; c < clusters_; ++c)
            if (!seen[c]) throw InvariantError("cluster " + std::to_string(c) + " is empty");
    }

    std::vector<Label> labels_;
    std::size_t clusters_ = 0;
};

/// Relabels so that cluster j is the j-th distinct label met scanning points in order.
inline std::vector<Label> canonical_labels(std::span<const Label> labels) {
    constexpr Label unset = std::numeric_limits<Label>::max();
    std::vector<Label> remap;
    std::vector<Label> out(labels.size());
    Label next = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Label l = labels[i];
        if (l >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, unset);
        if (remap[l] == unset) remap[l] = next++;
        out[i] = remap[l];
    }
    return out;
}

inline Partition canonicalize(const Partition& p) {
    return Partition(canonical_labels(p.labels()), p.clusters());
}

inline bool operator==(const Partition& a, const Partition& b) {
    if (a.size() != b.size() || a.clusters() != b.clusters()) return false;
    if (a.is_canonical() && b.is_canonical())
        return std::equal(a.labels_.begin(), a.labels_.end(), b.labels_.begin());
    return canonical_labels(a.labels()) == canonical_labels(b.labels());
}

/// Co-membership counts between two partitions of the same points.
struct ConfusionMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t n = 0;
    std::vector<std::size_t> counts;  // row-major rows x cols
    std::vector<std::size_t> row_sums;
    std::vector<std::size_t> col_sums;

    std::size_t operator()(std::size_t a, std::size_t b) const noexcept {
        return counts[a * cols + b];
    }
};

inline ConfusionMatrix confusion(const Partition& p, const Partition& q) {
    if (p.size() != q.size())
        throw DimensionError("partitions cover " + std::to_string(p.size()) + " and " +
                             std::to_string(q.size()) + " points");
    ConfusionMatrix m;
    m.rows = p.clusters();
    m.cols = q.clusters();
    m.n = p.size();
    m.counts.assign(m.rows * m.cols, 0);
    m.row_sums.assign(m.rows, 0);
    m.col_sums.assign(m.cols, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        ++m.counts[p[i] * m.cols + q[i]];
        ++m.row_sums[p[i]];
        ++m.col_sums[q[i]];
    }
    return m;
}

// Text form: labels separated by single spaces.

inline std::string to_line(const Partition& p) {
    std::string out;
    out.reserve(p.size() * 2);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out.push_back(' ');
        out += std::to_string(p[i]);
    }
    return out;
}

inline std::vector<Label> parse_labels(std::string_view text) {
    std::vector<Label> labels;
    const char* it = text.data();
    const char* end = text.data() + text.size();
    while (it != end) {
        while (it != end && (*it == ' ' || *it == '\t' || *it == '\r')) ++it;
        if (it == end) break;
        Label value = 0;
        auto [ptr, ec] = std::from_chars(it, end, value);
        if (ec != std::errc() || (ptr != end && *ptr != ' ' && *ptr != '\t' && *ptr != '\r'))
            throw ParseError("bad cluster label in '" + std::string(text) + "'");
        labels.push_back(value);
        it = ptr;
    }
    return labels;
}

inline Partition parse_line(std::string_view text, std::size_t clusters) {
    return Partition(parse_labels(text), clusters);
}

}  // namespace partscape
