#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/io.hpp"
#include "partscape/matrix.hpp"
#include "partscape/partition.hpp"
#include "partscape/point_set.hpp"
#include "partscape/quality.hpp"
#include "partscape/rng.hpp"

namespace partscape {

struct Dataset {
    PointSet points;
    std::optional<Partition> reference;
};

/// Reads a comma-separated numeric table. A first row whose cells are all
/// non-numeric is taken as a header. When `label_column` is set that column
/// is read as free text and remapped to labels 0..s-1 by first occurrence.
inline Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<double> values;
    std::vector<Label> labels;
    std::map<std::string, Label, std::less<>> label_ids;
    std::size_t arity = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::string line;
    bool first_content = true;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = detail::trim(line);
        if (view.empty()) continue;
        const auto cells = detail::split_commas(view);

        if (first_content) {
            first_content = false;
            bool all_text = true;
            for (auto c : cells) all_text = all_text && !detail::parse_double(c);
            if (all_text) continue;
        }

        const std::string where = "'" + path + "' line " + std::to_string(line_no);
        if (arity == 0) {
            arity = cells.size();
            if (label_column && *label_column >= arity)
                throw ParseError(where + ": label column " + std::to_string(*label_column) +
                                 " out of range for " + std::to_string(arity) + " columns");
            if (arity - (label_column ? 1 : 0) == 0) throw ParseError(where + ": no numeric columns");
        } else if (cells.size() != arity) {
            throw ParseError(where + ": expected " + std::to_string(arity) + " columns, found " +
                             std::to_string(cells.size()));
        }

        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (label_column && c == *label_column) {
                auto it = label_ids.find(cells[c]);
                if (it == label_ids.end())
                    it = label_ids.emplace(std::string(cells[c]), static_cast<Label>(label_ids.size())).first;
                labels.push_back(it->second);
                continue;
            }
            const auto value = detail::parse_double(cells[c]);
            if (!value || !std::isfinite(*value))
                throw ParseError(where + ": column " + std::to_string(c) + " is not a finite number ('" +
                                 std::string(cells[c]) + "')");
            values.push_back(*value);
        }
        ++rows;
    }

    if (rows < 2) throw InputError("'" + path + "' has fewer than 2 data rows");
    const std::size_t d = arity - (label_column ? 1 : 0);
    Matrix coords(rows, d);
    std::copy(values.begin(), values.end(), coords.data().begin());
    Dataset out{PointSet(std::move(coords)), std::nullopt};
    if (label_column) out.reference = Partition(std::move(labels), label_ids.size());
    return out;
}

/// Writes points (and optionally labels as the last column) with a header.
/// Two-dimensional data uses the header x,y[,label]; otherwise x1..xd[,label].
inline void write_csv(const std::string& path, const PointSet& points,
                      const std::optional<Partition>& labels = {}) {
    if (labels && labels->size() != points.size())
        throw DimensionError("label vector does not match the point count");
    std::ostringstream out;
    const std::size_t d = points.dim();
    for (std::size_t k = 0; k < d; ++k) {
        if (k) out << ',';
        if (d == 2) out << (k == 0 ? "x" : "y");
        else out << 'x' << (k + 1);
    }
    if (labels) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            if (k) out << ',';
            out << detail::format_double(points[i][k]);
        }
        if (labels) out << ',' << (*labels)[i];
        out << '\n';
    }
    detail::write_text(path, out.str());
}

/// Synthetic 2D5C benchmark: 100 points in the plane, 20 from each of five
/// isotropic unit-variance Gaussians whose means sit on a regular pentagon of
/// circumradius 10 (adjacent means 11.76 apart). Points are ordered by
/// component; the reference partition is the component label.
inline Dataset generate_2d5c(std::uint64_t seed) {
    constexpr std::size_t components = 5;
    constexpr std::size_t per_component = 20;
    constexpr double radius = 10.0;
    Rng rng(seed);
    Matrix coords(components * per_component, 2);
    std::vector<Label> labels(components * per_component);
    for (std::size_t c = 0; c < components; ++c) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / components;
        const double cx = radius * std::cos(angle);
        const double cy = radius * std::sin(angle);
        for (std::size_t j = 0; j < per_component; ++j) {
            const std::size_t i = c * per_component + j;
            coords(i, 0) = cx + rng.normal();
            coords(i, 1) = cy + rng.normal();
            labels[i] = static_cast<Label>(c);
        }
    }
    return {PointSet(std::move(coords)), Partition(std::move(labels), components)};
}

namespace detail {

/// One Lloyd run from k-means++ seeding, until no assignment changes or
/// `max_iterations`. A cluster left empty by an assignment step has its
/// center moved onto the worst-fitting point of a cluster that can spare one.
inline std::vector<Label> lloyd(const PointSet& points, std::size_t s, Rng rng, std::size_t max_iterations) {
    const std::size_t n = points.size();
    const std::size_t d = points.dim();

    Matrix centers(s, d);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    auto set_center = [&](std::size_t c, std::size_t i) {
        for (std::size_t k = 0; k < d; ++k) centers(c, k) = points[i][k];
    };
    set_center(0, static_cast<std::size_t>(rng.below(n)));
    for (std::size_t c = 1; c < s; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centers.row(c - 1)));
            total += nearest[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= nearest[i];
                if (target < 0.0 && nearest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(n));
        }
        set_center(c, pick);
    }

    std::vector<Label> labels(n, 0);
    std::vector<double> dist(n, 0.0);
    auto assign = [&] {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            Label best = 0;
            double best_d = squared_distance(points[i], centers.row(0));
            for (std::size_t c = 1; c < s; ++c) {
                const double dc = squared_distance(points[i], centers.row(c));
                if (dc < best_d) {
                    best_d = dc;
                    best = static_cast<Label>(c);
                }
            }
            changed = changed || labels[i] != best;
            labels[i] = best;
            dist[i] = best_d;
        }
        return changed;
    };

    // Reseeds each empty cluster on the worst-fitting point of a cluster that can spare one.
    auto repair_empty = [&] {
        bool repaired = false;
        for (std::size_t c = 0; c < s; ++c) {
            std::vector<std::size_t> sizes(s, 0);
            for (Label l : labels) ++sizes[l];
            if (sizes[c] > 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (sizes[labels[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
            set_center(c, far);
            labels[far] = static_cast<Label>(c);
            dist[far] = 0.0;
            repaired = true;
        }
        return repaired;
    };

    assign();
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        repair_empty();
        Matrix sums(s, d);
        std::vector<std::size_t> counts(s, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            for (std::size_t k = 0; k < d; ++k) sums(labels[i], k) += points[i][k];
        }
        for (std::size_t c = 0; c < s; ++c)
            for (std::size_t k = 0; k < d; ++k) centers(c, k) = sums(c, k) / static_cast<double>(counts[c]);
        if (!assign()) break;
    }
    // Duplicate points can tie every center; force nonempty clusters.
    repair_empty();
    return labels;
}

}  // namespace detail

/// k-means with `restarts` independent k-means++/Lloyd runs, keeping the one
/// with the smallest within-cluster sum of squares (earliest on ties).
/// Returns the canonical partition.
inline Partition kmeans_seed(const PointSet& points, std::size_t s, std::uint64_t seed,
                             std::size_t restarts = 10, std::size_t max_iterations = 100) {
    if (s < 2 || s > points.size())
        throw ParameterError("k-means needs 2 <= s <= n (s=" + std::to_string(s) +
                             ", n=" + std::to_string(points.size()) + ")");
    if (restarts < 1) throw ParameterError("k-means needs at least one restart");
    const Rng root(seed);
    std::optional<Partition> best;
    double best_ssq = 0.0;
    for (std::size_t r = 0; r < restarts; ++r) {
        Partition p(detail::lloyd(points, s, root.split(r), max_iterations), s);
        const double ssq = within_cluster_ssq(p, points);
        if (!best || ssq < best_ssq) {
            best = std::move(p);
            best_ssq = ssq;
        }
    }
    return canonicalize(*best);
}

}  // namespace partscape
