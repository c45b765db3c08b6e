#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partscape/io.hpp"
#include "partscape/error.hpp"
#include "partscape/pdist.hpp"

namespace partscape {

/// k representatives chosen among the samples and the nearest-representative map.
struct GroupingResult {
    std::vector<std::size_t> representatives;  // sample indices, in selection order
    std::vector<std::size_t> assignment;       // sample index -> representative sample index
    std::vector<double> distance;              // sample index -> distance to its representative

    double radius() const noexcept {
        return distance.empty() ? 0.0 : *std::max_element(distance.begin(), distance.end());
    }
    bool operator==(const GroupingResult&) const = default;
};

/// Nearest representative for every sample. Representatives map to
/// themselves; other ties go to the lowest sample index.
inline GroupingResult assign_to_representatives(const DistanceMatrix& d, std::vector<std::size_t> reps) {
    const std::size_t m = d.size();
    GroupingResult g;
    g.representatives = std::move(reps);
    std::vector<std::size_t> by_index = g.representatives;
    std::sort(by_index.begin(), by_index.end());
    g.assignment.resize(m);
    g.distance.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (std::binary_search(by_index.begin(), by_index.end(), i)) {
            g.assignment[i] = i;
            g.distance[i] = 0.0;
            continue;
        }
        std::size_t best = by_index.front();
        for (std::size_t c : by_index)
            if (d(i, c) < d(i, best)) best = c;
        g.assignment[i] = best;
        g.distance[i] = d(i, best);
    }
    return g;
}

/// Gonzalez farthest-point k-center: start from `first`, then repeatedly add
/// the sample farthest from its nearest chosen center (ties to the lowest
/// index) until k centers are chosen. Radius is within 2x of optimal.
inline GroupingResult gonzalez_kcenter(const DistanceMatrix& d, std::size_t k, std::size_t first) {
    const std::size_t m = d.size();
    if (k < 1 || k > m)
        throw ParameterError("k-center needs 1 <= k <= m (k=" + std::to_string(k) + ", m=" + std::to_string(m) + ")");
    if (first >= m) throw ParameterError("first center index out of range");

    std::vector<std::size_t> centers{first};
    std::vector<char> is_center(m, 0);
    is_center[first] = 1;
    std::vector<double> nearest(m);
    for (std::size_t i = 0; i < m; ++i) nearest[i] = d(i, first);

    while (centers.size() < k) {
        std::size_t pick = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (is_center[i]) continue;
            if (pick == m || nearest[i] > nearest[pick]) pick = i;
        }
        centers.push_back(pick);
        is_center[pick] = 1;
        for (std::size_t i = 0; i < m; ++i) nearest[i] = std::min(nearest[i], d(i, pick));
    }
    return assign_to_representatives(d, std::move(centers));
}

/// Highest-quality sample, lowest index on ties.
inline std::size_t best_quality_index(const std::vector<double>& qualities) {
    if (qualities.empty()) throw ParameterError("no samples");
    return static_cast<std::size_t>(std::max_element(qualities.begin(), qualities.end()) - qualities.begin());
}

struct RepresentativeSummary {
    std::size_t representative = 0;
    std::vector<std::size_t> members;        // ascending, includes the representative
    std::vector<double> member_distances;    // aligned with members
    double spread_variance = 0.0;            // population variance of member_distances
    std::optional<double> nearest_other;     // absent when k = 1
};

/// Per-representative statistics, in representative selection order.
inline std::vector<RepresentativeSummary> summarize_grouping(const DistanceMatrix& d, const GroupingResult& g) {
    if (g.assignment.size() != d.size()) throw DimensionError("grouping does not match the distance matrix");
    std::vector<RepresentativeSummary> out;
    out.reserve(g.representatives.size());
    for (std::size_t rep : g.representatives) {
        RepresentativeSummary r;
        r.representative = rep;
        for (std::size_t i = 0; i < g.assignment.size(); ++i) {
            if (g.assignment[i] != rep) continue;
            r.members.push_back(i);
            r.member_distances.push_back(d(i, rep));
        }
        double mean = 0.0;
        for (double x : r.member_distances) mean += x;
        mean /= static_cast<double>(r.member_distances.size());
        double var = 0.0;
        for (double x : r.member_distances) var += (x - mean) * (x - mean);
        r.spread_variance = var / static_cast<double>(r.member_distances.size());
        for (std::size_t other : g.representatives) {
            if (other == rep) continue;
            if (!r.nearest_other || d(rep, other) < *r.nearest_other) r.nearest_other = d(rep, other);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Grouping record file:
//   k <k> m <m>
//   representatives <i_1> ... <i_k>
//   assignment <phi_0> ... <phi_{m-1}>
//   distance <d_0> ... <d_{m-1}>

inline void write_grouping(const std::string& path, const GroupingResult& g) {
    std::ostringstream out;
    out << "k " << g.representatives.size() << " m " << g.assignment.size() << "\nrepresentatives";
    for (std::size_t r : g.representatives) out << ' ' << r;
    out << "\nassignment";
    for (std::size_t a : g.assignment) out << ' ' << a;
    out << "\ndistance";
    for (double x : g.distance) out << ' ' << detail::format_double(x);
    out << '\n';
    detail::write_text(path, out.str());
}

inline GroupingResult read_grouping(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string tag;
    std::size_t k = 0;
    std::size_t m = 0;
    std::string mtag;
    if (!(in >> tag >> k >> mtag >> m) || tag != "k" || mtag != "m")
        throw ParseError("'" + path + "': expected 'k <k> m <m>'");
    GroupingResult g;
    g.representatives.resize(k);
    g.assignment.resize(m);
    g.distance.resize(m);
    if (!(in >> tag) || tag != "representatives") throw ParseError("'" + path + "': missing representatives");
    for (auto& r : g.representatives)
        if (!(in >> r)) throw ParseError("'" + path + "': truncated representatives");
    if (!(in >> tag) || tag != "assignment") throw ParseError("'" + path + "': missing assignment");
    for (auto& a : g.assignment)
        if (!(in >> a)) throw ParseError("'" + path + "': truncated assignment");
    if (!(in >> tag) || tag != "distance") throw ParseError("'" + path + "': missing distance");
    for (auto& x : g.distance) {
        std::string cell;
        if (!(in >> cell)) throw ParseError("'" + path + "': truncated distance");
        const auto v = detail::parse_double(cell);
        if (!v) throw ParseError("'" + path + "': bad distance '" + cell + "'");
        x = *v;
    }
    return g;
}

/// Summary table: representative, members, spread variance, nearest other
/// representative distance ("NA" when k = 1).
inline void write_grouping_summary(const std::string& path, const std::vector<RepresentativeSummary>& summary) {
    std::ostringstream out;
    out << "representative,members,spread_variance,nearest_representative_distance\n";
    for (const auto& r : summary) {
        out << r.representative << ',' << r.members.size() << ',' << detail::format_double(r.spread_variance) << ','
            << (r.nearest_other ? detail::format_double(*r.nearest_other) : std::string("NA")) << '\n';
    }
    detail::write_text(path, out.str());
}

}  // namespace partscape
