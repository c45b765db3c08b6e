#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/matrix.hpp"
#include "partscape/pdist.hpp"

namespace partscape {

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible. Meant
/// for the small (k x k) matrices of the representative landscape.
inline SymmetricEigen jacobi_eigen(Matrix a, std::size_t max_sweeps = 100) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ContractError("eigen decomposition needs a square matrix");
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (double x : a.data()) scale += x * x;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= 1e-30 * scale || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        // Sign convention: the largest-magnitude component is positive.
        std::size_t big = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(v(k, order[j])) > std::abs(v(big, order[j]))) big = k;
        const double sign = v(big, order[j]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, order[j]);
    }
    return out;
}

struct Embedding {
    Matrix coords;                  // k x dim
    std::vector<double> eigenvalues;  // all k, descending
    bool clamped_negative = false;  // a kept eigenvalue was negative and set to 0
};

/// Classical (Torgerson) MDS: eigendecomposition of -1/2 J D^2 J, keeping
/// the top `dim` eigenpairs scaled by sqrt(eigenvalue).
inline Embedding classical_mds(const DistanceMatrix& d, std::size_t dim) {
    const std::size_t k = d.size();
    if (dim < 1 || dim > 3) throw ParameterError("MDS dimension must be 1, 2 or 3");
    if (k < dim + 1) throw ParameterError("MDS into " + std::to_string(dim) + " dimensions needs at least " +
                                          std::to_string(dim + 1) + " points");
    d.check_metric_shape();

    Matrix b(k, k);
    std::vector<double> row_mean(k, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double sq = d(i, j) * d(i, j);
            b(i, j) = sq;
            row_mean[i] += sq / static_cast<double>(k);
        }
    for (double r : row_mean) grand += r / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) b(i, j) = -0.5 * (b(i, j) - row_mean[i] - row_mean[j] + grand);

    SymmetricEigen eig = jacobi_eigen(std::move(b));
    Embedding out;
    out.coords = Matrix(k, dim);
    out.eigenvalues = eig.values;
    for (std::size_t c = 0; c < dim; ++c) {
        double lambda = eig.values[c];
        if (lambda < 0.0) {
            out.clamped_negative = true;
            lambda = 0.0;
        }
        const double root = std::sqrt(lambda);
        for (std::size_t i = 0; i < k; ++i) out.coords(i, c) = root * eig.vectors(i, c);
    }
    return out;
}

}  // namespace partscape
