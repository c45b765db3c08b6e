#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "partscape/io.hpp"
#include "partscape/error.hpp"
#include "partscape/kernel.hpp"
#include "partscape/matrix.hpp"
#include "partscape/partition.hpp"
#include "partscape/point_set.hpp"
#include "partscape/transport.hpp"

namespace partscape {

// ---------------------------------------------------------------------------
// Membership-based distances

/// Fraction of unordered point pairs co-clustered in exactly one of p, q.
inline double rand_distance(const Partition& p, const Partition& q) {
    const ConfusionMatrix m = confusion(p, q);
    if (m.n < 2) throw ParameterError("rand distance needs at least 2 points");
    auto pairs = [](std::size_t x) { return x < 2 ? 0.0 : static_cast<double>(x) * static_cast<double>(x - 1) / 2.0; };
    double rows = 0.0;
    double cols = 0.0;
    double both = 0.0;
    for (std::size_t r : m.row_sums) rows += pairs(r);
    for (std::size_t c : m.col_sums) cols += pairs(c);
    for (std::size_t x : m.counts) both += pairs(x);
    return (rows + cols - 2.0 * both) / pairs(m.n);
}

/// H(p) + H(q) - 2 I(p, q) in nats.
inline double variation_of_information(const Partition& p, const Partition& q) {
    const ConfusionMatrix m = confusion(p, q);
    const auto n = static_cast<double>(m.n);
    double vi = 0.0;
    for (std::size_t a = 0; a < m.rows; ++a) {
        for (std::size_t b = 0; b < m.cols; ++b) {
            const std::size_t nab = m(a, b);
            if (nab == 0) continue;
            const auto x = static_cast<double>(nab);
            vi += x / n * (std::log(static_cast<double>(m.row_sums[a]) / x) +
                           std::log(static_cast<double>(m.col_sums[b]) / x));
        }
    }
    return std::max(0.0, vi);
}

inline double entropy(std::span<const std::size_t> sizes, std::size_t n) {
    double h = 0.0;
    for (std::size_t c : sizes) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h;
}

inline double mutual_information(const ConfusionMatrix& m) {
    const auto n = static_cast<double>(m.n);
    double mi = 0.0;
    for (std::size_t a = 0; a < m.rows; ++a)
        for (std::size_t b = 0; b < m.cols; ++b) {
            const std::size_t nab = m(a, b);
            if (nab == 0) continue;
            const auto x = static_cast<double>(nab);
            mi += x / n *
                  std::log(n * x / (static_cast<double>(m.row_sums[a]) * static_cast<double>(m.col_sums[b])));
        }
    return mi;
}

/// 1 - I(p,q) / sqrt(H(p) H(q)); undefined when either partition has one cluster.
inline double nmi_distance(const Partition& p, const Partition& q) {
    const ConfusionMatrix m = confusion(p, q);
    const double hp = entropy(m.row_sums, m.n);
    const double hq = entropy(m.col_sums, m.n);
    if (!(hp > 0.0) || !(hq > 0.0))
        throw UndefinedError("normalized mutual information is undefined for a single-cluster partition");
    return std::clamp(1.0 - mutual_information(m) / std::sqrt(hp * hq), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// LiftEMD: clusters as kernel mean embeddings, compared by earthmover's distance

/// Per-partition data reused across every LiftEMD evaluation involving it.
///
/// `mass(i, b)` is the kernel mass between point i and cluster b, always
/// accumulated over members in ascending index order. Self and cross
/// similarities are both sums of these entries in ascending point order, so
/// two identical clusters from different partitions yield bit-identical
/// similarities and a ground distance of exactly zero.
class LiftEmbedding {
public:
    LiftEmbedding(const Partition& p, const Matrix& gram)
        : labels_(p.labels().begin(), p.labels().end()), sizes_(p.cluster_sizes()),
          mass_(p.size(), p.clusters()) {
        if (gram.rows() != p.size()) throw DimensionError("gram matrix does not match the partition");
        const std::size_t n = p.size();
        const std::size_t s = p.clusters();
        for (std::size_t i = 0; i < n; ++i) {
            auto row = mass_.row(i);
            auto g = gram.row(i);
            for (std::size_t j = 0; j < n; ++j) row[labels_[j]] += g[j];
        }
        weights_.resize(s);
        self_.assign(s, 0.0);
        for (std::size_t i = 0; i < n; ++i) self_[labels_[i]] += mass_(i, labels_[i]);
        for (std::size_t c = 0; c < s; ++c) {
            const auto size = static_cast<double>(sizes_[c]);
            weights_[c] = size / static_cast<double>(n);
            self_[c] /= size * size;
        }
    }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t clusters() const noexcept { return sizes_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    /// Normalized self similarity kappa(A,A) / |A|^2.
    double self_similarity(std::size_t c) const noexcept { return self_[c]; }

    /// Ground distances between the clusters of *this (rows) and `other`
    /// (columns): sqrt(max(0, k(A,A) + k(B,B) - 2 k(A,B))) on normalized similarities.
    void ground(const LiftEmbedding& other, Matrix& out) const {
        const std::size_t s1 = clusters();
        const std::size_t s2 = other.clusters();
        if (other.size() != size()) throw DimensionError("LiftEMD partitions cover different point counts");
        if (out.rows() != s1 || out.cols() != s2) out = Matrix(s1, s2);
        std::fill(out.data().begin(), out.data().end(), 0.0);
        double* acc = out.data().data();
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            double* row = acc + labels_[i] * s2;
            const double* m = other.mass_.row(i).data();
            for (std::size_t b = 0; b < s2; ++b) row[b] += m[b];
        }
        for (std::size_t a = 0; a < s1; ++a) {
            for (std::size_t b = 0; b < s2; ++b) {
                const double cross =
                    acc[a * s2 + b] / (static_cast<double>(sizes_[a]) * static_cast<double>(other.sizes_[b]));
                const double sq = self_[a] + other.self_[b] - 2.0 * cross;
                acc[a * s2 + b] = std::sqrt(std::max(0.0, sq));
            }
        }
    }

private:
    std::vector<Label> labels_;
    std::vector<std::size_t> sizes_;
    Matrix mass_;
    std::vector<double> weights_;
    std::vector<double> self_;
};

inline double lift_emd(const LiftEmbedding& p, const LiftEmbedding& q, TransportSolver& solver, Matrix& ground) {
    p.ground(q, ground);
    return solver.solve(p.weights(), q.weights(), ground);
}

inline double lift_emd(const Partition& p, const Partition& q, const Matrix& gram) {
    if (p.size() != q.size()) throw DimensionError("LiftEMD partitions cover different point counts");
    TransportSolver solver;
    Matrix ground;
    return lift_emd(LiftEmbedding(p, gram), LiftEmbedding(q, gram), solver, ground);
}

inline double lift_emd(const Partition& p, const Partition& q, const PointSet& points, const KernelSpec& kernel) {
    if (p.size() != points.size() || q.size() != points.size())
        throw DimensionError("LiftEMD partitions do not cover the point set");
    return lift_emd(p, q, gram_matrix(points, kernel));
}

// ---------------------------------------------------------------------------
// Distance matrices

enum class DistanceKind { rand, vi, nmi, liftemd };

/// A base distance, optionally wrapped in the density (rank) transform.
struct DistanceSpec {
    DistanceKind base = DistanceKind::liftemd;
    bool density = false;

    std::string name() const {
        std::string b;
        switch (base) {
            case DistanceKind::rand: b = "rand"; break;
            case DistanceKind::vi: b = "vi"; break;
            case DistanceKind::nmi: b = "nmi"; break;
            case DistanceKind::liftemd: b = "liftemd"; break;
        }
        return density ? "density(" + b + ")" : b;
    }

    static DistanceSpec parse(std::string_view text) {
        DistanceSpec spec;
        if (text.starts_with("density(") && text.ends_with(")")) {
            spec.density = true;
            text = text.substr(8, text.size() - 9);
        }
        if (text == "rand") spec.base = DistanceKind::rand;
        else if (text == "vi") spec.base = DistanceKind::vi;
        else if (text == "nmi") spec.base = DistanceKind::nmi;
        else if (text == "liftemd") spec.base = DistanceKind::liftemd;
        else
            throw ParameterError("unknown distance '" + std::string(text) +
                                 "' (rand|vi|nmi|liftemd, optionally wrapped as density(...))");
        return spec;
    }
};

/// Symmetric, zero-diagonal matrix of distances between partitions.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(Matrix values, std::string kind) : values_(std::move(values)), kind_(std::move(kind)) {
        if (values_.rows() != values_.cols()) throw ContractError("distance matrix must be square");
    }

    std::size_t size() const noexcept { return values_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    const Matrix& values() const noexcept { return values_; }
    const std::string& kind() const noexcept { return kind_; }

    /// Throws ContractError unless symmetric within `tolerance` with an exactly zero diagonal.
    void check_metric_shape(double tolerance = 1e-12) const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (values_(i, i) != 0.0) throw ContractError("distance matrix diagonal is not zero");
            for (std::size_t j = i + 1; j < size(); ++j)
                if (std::abs(values_(i, j) - values_(j, i)) > tolerance)
                    throw ContractError("distance matrix is not symmetric");
        }
    }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    Matrix values_;
    std::string kind_;
};

namespace detail {

// Fills the upper triangle with `entry(i, j, worker)` and mirrors it. Rows are
// dealt to workers round-robin; every entry is written by exactly one worker,
// so the result does not depend on scheduling.
template <class Entry>
void fill_symmetric(Matrix& out, std::size_t threads, Entry&& entry) {
    const std::size_t m = out.rows();
    threads = std::max<std::size_t>(1, std::min(threads, m));
    auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < m; i += threads)
            for (std::size_t j = i + 1; j < m; ++j) out(i, j) = entry(i, j, worker);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < m; ++i) {
        out(i, i) = 0.0;
        for (std::size_t j = i + 1; j < m; ++j) out(j, i) = out(i, j);
    }
}

inline std::size_t default_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Number of samples l != i with base(i, l) < base(i, j).
inline std::size_t density_distance(const DistanceMatrix& base, std::size_t i, std::size_t j) {
    if (i >= base.size() || j >= base.size())
        throw ParameterError("sample index out of range for a " + std::to_string(base.size()) + "-sample matrix");
    const double threshold = base(i, j);
    std::size_t count = 0;
    for (std::size_t l = 0; l < base.size(); ++l)
        if (l != i && base(i, l) < threshold) ++count;
    return count;
}

/// density_distance for every ordered pair; not symmetric in general.
inline Matrix density_ranks(const DistanceMatrix& base) {
    const std::size_t m = base.size();
    Matrix ranks(m, m);
    std::vector<double> row;
    for (std::size_t i = 0; i < m; ++i) {
        row.clear();
        for (std::size_t l = 0; l < m; ++l)
            if (l != i) row.push_back(base(i, l));
        std::sort(row.begin(), row.end());
        for (std::size_t j = 0; j < m; ++j)
            ranks(i, j) = static_cast<double>(std::lower_bound(row.begin(), row.end(), base(i, j)) - row.begin());
        ranks(i, i) = 0.0;
    }
    return ranks;
}

/// Symmetrized density distances, max(d_Z(i,j), d_Z(j,i)), for grouping and MDS.
inline DistanceMatrix density_matrix(const DistanceMatrix& base) {
    Matrix ranks = density_ranks(base);
    const std::size_t m = base.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double v = std::max(ranks(i, j), ranks(j, i));
            ranks(i, j) = v;
            ranks(j, i) = v;
        }
    return DistanceMatrix(std::move(ranks), "density(" + base.kind() + ")");
}

/// All pairwise distances of the requested kind. `points` and `kernel` are
/// used by LiftEMD only.
inline DistanceMatrix pairwise_matrix(const std::vector<Partition>& partitions, const DistanceSpec& spec,
                                      const PointSet& points, const KernelSpec& kernel,
                                      std::size_t threads = detail::default_threads()) {
    const std::size_t m = partitions.size();
    if (m == 0) throw ParameterError("no partitions to compare");
    for (const auto& p : partitions)
        if (p.size() != partitions.front().size()) throw DimensionError("partitions cover different point counts");

    Matrix values(m, m);
    switch (spec.base) {
        case DistanceKind::rand:
            detail::fill_symmetric(values, threads, [&](std::size_t i, std::size_t j, std::size_t) {
                return rand_distance(partitions[i], partitions[j]);
            });
            break;
        case DistanceKind::vi:
            detail::fill_symmetric(values, threads, [&](std::size_t i, std::size_t j, std::size_t) {
                return variation_of_information(partitions[i], partitions[j]);
            });
            break;
        case DistanceKind::nmi:
            detail::fill_symmetric(values, threads, [&](std::size_t i, std::size_t j, std::size_t) {
                return nmi_distance(partitions[i], partitions[j]);
            });
            break;
        case DistanceKind::liftemd: {
            if (partitions.front().size() != points.size())
                throw DimensionError("partitions do not cover the point set");
            const Matrix gram = gram_matrix(points, kernel);
            std::vector<LiftEmbedding> embeddings;
            embeddings.reserve(m);
            for (const auto& p : partitions) embeddings.emplace_back(p, gram);
            threads = std::max<std::size_t>(1, std::min(threads, m));
            std::vector<TransportSolver> solvers(threads);
            std::vector<Matrix> grounds(threads);
            detail::fill_symmetric(values, threads, [&](std::size_t i, std::size_t j, std::size_t w) {
                return lift_emd(embeddings[i], embeddings[j], solvers[w], grounds[w]);
            });
            break;
        }
    }
    DistanceMatrix base(std::move(values), DistanceSpec{spec.base, false}.name());
    return spec.density ? density_matrix(base) : base;
}

// Distance-matrix file: a "# kind=<name> m=<m>" line, then m comma-separated rows.

inline void write_distance_matrix(const std::string& path, const DistanceMatrix& d) {
    std::ostringstream out;
    out << "# kind=" << d.kind() << " m=" << d.size() << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (j) out << ',';
            out << detail::format_double(d(i, j));
        }
        out << '\n';
    }
    detail::write_text(path, out.str());
}

inline DistanceMatrix read_distance_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("# kind="))
        throw ParseError("'" + path + "': missing '# kind=... m=...' header");
    std::istringstream header(line.substr(7));
    std::string kind;
    std::string msize;
    header >> kind >> msize;
    if (!msize.starts_with("m=")) throw ParseError("'" + path + "': header lacks m=");
    const auto m = detail::parse_double(std::string_view(msize).substr(2));
    if (!m || *m < 1) throw ParseError("'" + path + "': bad matrix size");
    const auto size = static_cast<std::size_t>(*m);
    Matrix values(size, size);
    for (std::size_t i = 0; i < size; ++i) {
        if (!std::getline(in, line)) throw ParseError("'" + path + "': expected " + std::to_string(size) + " rows");
        const auto cells = detail::split_commas(line);
        if (cells.size() != size)
            throw ParseError("'" + path + "' row " + std::to_string(i + 1) + ": expected " +
                             std::to_string(size) + " columns");
        for (std::size_t j = 0; j < size; ++j) {
            const auto v = detail::parse_double(cells[j]);
            if (!v) throw ParseError("'" + path + "' row " + std::to_string(i + 1) + ": bad number");
            values(i, j) = *v;
        }
    }
    return DistanceMatrix(std::move(values), kind);
}

}  // namespace partscape
