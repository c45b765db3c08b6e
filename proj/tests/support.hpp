#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "partscape.hpp"

namespace partscape::testing {

inline PointSet line_points(std::vector<double> xs) {
    Matrix m(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
    return PointSet(std::move(m));
}

inline PointSet random_points(std::size_t n, std::size_t d, Rng& rng, double scale = 3.0) {
    Matrix m(n, d);
    for (double& v : m.data()) v = scale * rng.normal();
    return PointSet(std::move(m));
}

/// Two tight blobs of n/2 points each around (-3, 0) and (3, 0).
inline PointSet two_blobs(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, 0) = (i < n / 2 ? -3.0 : 3.0) + rng.normal();
        m(i, 1) = rng.normal();
    }
    return PointSet(std::move(m));
}

inline Partition random_partition(std::size_t n, std::size_t s, Rng& rng) {
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(i < s ? i : rng.below(s));
    rng.shuffle(std::span<Label>(labels));
    return Partition(std::move(labels), s);
}

/// Fresh empty directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("partscape_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

/// Solves a x = b by Gaussian elimination with partial pivoting; false if singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

/// Optimal transport cost by enumerating every basic solution of the
/// transportation polytope: choose r + c - 1 cells, solve the equality
/// constraints (one redundant row dropped), keep nonnegative solutions.
inline double transport_by_vertices(const std::vector<double>& supply, const std::vector<double>& demand,
                                    const Matrix& cost) {
    const std::size_t r = supply.size();
    const std::size_t c = demand.size();
    const std::size_t cells = r * c;
    const std::size_t basis = r + c - 1;
    std::vector<double> rhs(supply);
    rhs.insert(rhs.end(), demand.begin(), demand.end() - 1);

    double best = std::numeric_limits<double>::infinity();
    std::vector<char> pick(cells, 0);
    std::fill(pick.begin(), pick.begin() + basis, 1);
    std::sort(pick.begin(), pick.end());
    do {
        std::vector<std::size_t> chosen;
        for (std::size_t k = 0; k < cells; ++k)
            if (pick[k]) chosen.push_back(k);
        std::vector<std::vector<double>> a(basis, std::vector<double>(basis, 0.0));
        for (std::size_t v = 0; v < basis; ++v) {
            const std::size_t i = chosen[v] / c;
            const std::size_t j = chosen[v] % c;
            a[i][v] = 1.0;
            if (j + 1 < c) a[r + j][v] = 1.0;
        }
        std::vector<double> x;
        if (!solve_linear(a, rhs, x)) continue;
        if (*std::min_element(x.begin(), x.end()) < -1e-12) continue;
        double total = 0.0;
        for (std::size_t v = 0; v < basis; ++v) total += x[v] * cost.data()[chosen[v]];
        best = std::min(best, total);
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

/// Smallest k-center radius over all k-subsets.
inline double optimal_kcenter_radius(const DistanceMatrix& d, std::size_t k) {
    const std::size_t m = d.size();
    std::vector<char> pick(m, 0);
    std::fill(pick.begin(), pick.begin() + k, 1);
    std::sort(pick.begin(), pick.end());
    double best = std::numeric_limits<double>::infinity();
    do {
        double radius = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < m; ++c)
                if (pick[c]) nearest = std::min(nearest, d(i, c));
            radius = std::max(radius, nearest);
        }
        best = std::min(best, radius);
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

/// Euclidean distances between the rows of `coords`.
inline DistanceMatrix euclidean_matrix(const Matrix& coords) {
    const std::size_t k = coords.rows();
    Matrix d(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) d(i, j) = std::sqrt(squared_distance(coords.row(i), coords.row(j)));
    return DistanceMatrix(std::move(d), "euclidean");
}

inline double max_embedding_error(const DistanceMatrix& d, const Matrix& coords) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            worst = std::max(worst, std::abs(std::sqrt(squared_distance(coords.row(i), coords.row(j))) - d(i, j)));
    return worst;
}

/// Total variation between the empirical distribution of `samples` over the
/// enumerated partitions and the target weights.
inline double total_variation(const std::vector<Partition>& space, const std::vector<double>& target,
                              const std::vector<Partition>& samples) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < space.size(); ++i) index[to_line(canonicalize(space[i]))] = i;
    std::vector<double> counts(space.size(), 0.0);
    for (const auto& p : samples) counts.at(index.at(to_line(canonicalize(p)))) += 1.0;
    double tv = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        tv += std::abs(counts[i] / static_cast<double>(samples.size()) - target[i]);
    return tv / 2.0;
}

}  // namespace partscape::testing
