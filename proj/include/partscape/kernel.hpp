#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/matrix.hpp"
#include "partscape/point_set.hpp"
#include "partscape/rng.hpp"

namespace partscape {

/// Gaussian similarity K(x, y) = exp(-|x - y|^2 / (2 sigma^2)). Larger means
/// more similar; K(x, x) = 1.
struct KernelSpec {
    double bandwidth = 1.0;

    void validate() const {
        if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
            throw ParameterError("kernel bandwidth must be positive and finite");
    }

    double operator()(std::span<const double> x, std::span<const double> y) const noexcept {
        return std::exp(-squared_distance(x, y) / (2.0 * bandwidth * bandwidth));
    }
};

/// All pairwise kernel values; symmetric with a unit diagonal.
inline Matrix gram_matrix(const PointSet& points, const KernelSpec& kernel) {
    kernel.validate();
    const std::size_t n = points.size();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        g(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = kernel(points[i], points[j]);
            g(i, j) = k;
            g(j, i) = k;
        }
    }
    return g;
}

/// Median heuristic: median pairwise Euclidean distance over a random
/// subsample of `pairs` distinct-point pairs, or over all pairs when there
/// are no more than that many.
inline double median_bandwidth(const PointSet& points, std::uint64_t seed, std::size_t pairs = 1000) {
    const std::size_t n = points.size();
    std::vector<double> dists;
    const std::size_t total = n * (n - 1) / 2;
    if (total <= pairs) {
        dists.reserve(total);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dists.push_back(std::sqrt(squared_distance(points[i], points[j])));
    } else {
        Rng rng(seed);
        dists.reserve(pairs);
        while (dists.size() < pairs) {
            const auto i = static_cast<std::size_t>(rng.below(n));
            const auto j = static_cast<std::size_t>(rng.below(n));
            if (i == j) continue;
            dists.push_back(std::sqrt(squared_distance(points[i], points[j])));
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t mid = dists.size() / 2;
    const double median = dists.size() % 2 ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
    if (!(median > 0.0))
        throw NumericError("median pairwise distance is zero; set the kernel bandwidth explicitly");
    return median;
}

}  // namespace partscape
