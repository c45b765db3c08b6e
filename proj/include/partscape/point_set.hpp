#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "partscape/error.hpp"
#include "partscape/matrix.hpp"

namespace partscape {

/// The dataset: n points in d dimensions, one per row. Row order defines
/// point identity for every assignment vector built on top of it.
class PointSet {
public:
    explicit PointSet(Matrix coords) : coords_(std::move(coords)) {
        if (coords_.rows() < 2) throw InputError("a point set needs at least 2 points");
        if (coords_.cols() < 1) throw InputError("a point set needs at least 1 dimension");
        for (double v : coords_.data())
            if (!std::isfinite(v)) throw InputError("point coordinates must be finite");
    }

    std::size_t size() const noexcept { return coords_.rows(); }
    std::size_t dim() const noexcept { return coords_.cols(); }

    std::span<const double> operator[](std::size_t i) const noexcept { return coords_.row(i); }
    const Matrix& coords() const noexcept { return coords_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    Matrix coords_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace partscape
