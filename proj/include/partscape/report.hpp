#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partscape/error.hpp"
#include "partscape/grouping.hpp"
#include "partscape/io.hpp"
#include "partscape/kernel.hpp"
#include "partscape/mds.hpp"
#include "partscape/pdist.hpp"
#include "partscape/quality.hpp"

namespace partscape {

struct Histogram {
    std::vector<double> edges;  // bins + 1 values
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// A constant input puts everything in the first bin.
inline Histogram histogram(const std::vector<double>& values, std::size_t bins) {
    if (values.empty()) throw InputError("histogram of an empty series");
    if (bins < 1) throw ParameterError("histogram needs at least one bin");
    for (double v : values)
        if (!std::isfinite(v)) throw InputError("histogram values must be finite");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double width = (*hi_it - lo) / static_cast<double>(bins);
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
    h.edges[bins] = *hi_it;
    h.counts.assign(bins, 0);
    for (double v : values) {
        std::size_t b = 0;
        if (width > 0.0) b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
        ++h.counts[b];
    }
    return h;
}

/// Counts of `values` in the bins of an existing histogram's edges.
inline std::vector<std::size_t> bin_counts(const std::vector<double>& values, const std::vector<double>& edges) {
    const std::size_t bins = edges.size() - 1;
    std::vector<std::size_t> counts(bins, 0);
    const double lo = edges.front();
    const double width = (edges.back() - lo) / static_cast<double>(bins);
    for (double v : values) {
        std::size_t b = 0;
        if (width > 0.0 && v > lo) b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
        ++counts[b];
    }
    return counts;
}

/// Q_K(z_i) / Q_K(reference) for every sample.
inline std::vector<double> quality_ratio_series(const std::vector<Partition>& samples, const Partition& reference,
                                                const PointSet& points, const KernelSpec& kernel) {
    if (reference.size() != points.size()) throw DimensionError("reference partition does not cover the point set");
    const Matrix gram = gram_matrix(points, kernel);
    const double base = kernel_quality(reference, gram);
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& z : samples) {
        if (z.size() != points.size()) throw DimensionError("sample does not cover the point set");
        out.push_back(kernel_quality(z, gram) / base);
    }
    return out;
}

/// Distances among the representatives only, in selection order.
inline DistanceMatrix representative_matrix(const DistanceMatrix& d, const GroupingResult& g) {
    const std::size_t k = g.representatives.size();
    Matrix sub(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) sub(a, b) = d(g.representatives[a], g.representatives[b]);
    return DistanceMatrix(std::move(sub), d.kind());
}

/// Planar layout of the representatives with one spread circle each
/// (radius = standard deviation of member distances).
struct Landscape {
    std::vector<std::size_t> representatives;
    Matrix coords;  // k x 2
    std::vector<double> radii;
    std::vector<std::size_t> members;
    std::vector<double> eigenvalues;
};

inline Landscape landscape(const DistanceMatrix& d, const GroupingResult& g) {
    const auto summary = summarize_grouping(d, g);
    const std::size_t k = g.representatives.size();
    Landscape out;
    out.representatives = g.representatives;
    out.coords = Matrix(k, 2);
    if (k >= 2) {
        const std::size_t dim = std::min<std::size_t>(2, k - 1);
        const Embedding e = classical_mds(representative_matrix(d, g), dim);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < dim; ++c) out.coords(i, c) = e.coords(i, c);
        out.eigenvalues = e.eigenvalues;
    } else {
        out.eigenvalues = {0.0};
    }
    for (const auto& r : summary) {
        out.radii.push_back(std::sqrt(r.spread_variance));
        out.members.push_back(r.members.size());
    }
    return out;
}

// Landscape file: representative,x,y,radius,members
inline void write_landscape(const std::string& path, const Landscape& l) {
    std::ostringstream out;
    out << "representative,x,y,radius,members\n";
    for (std::size_t i = 0; i < l.representatives.size(); ++i)
        out << l.representatives[i] << ',' << detail::format_double(l.coords(i, 0)) << ','
            << detail::format_double(l.coords(i, 1)) << ',' << detail::format_double(l.radii[i]) << ','
            << l.members[i] << '\n';
    detail::write_text(path, out.str());
}

inline Landscape read_landscape(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::getline(in, line);
    Landscape l;
    std::vector<double> xs;
    std::vector<double> ys;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != 5) throw ParseError("'" + path + "': expected 5 columns");
        const auto rep = detail::parse_double(cells[0]);
        const auto x = detail::parse_double(cells[1]);
        const auto y = detail::parse_double(cells[2]);
        const auto r = detail::parse_double(cells[3]);
        const auto m = detail::parse_double(cells[4]);
        if (!rep || !x || !y || !r || !m) throw ParseError("'" + path + "': bad number");
        l.representatives.push_back(static_cast<std::size_t>(*rep));
        xs.push_back(*x);
        ys.push_back(*y);
        l.radii.push_back(*r);
        l.members.push_back(static_cast<std::size_t>(*m));
    }
    l.coords = Matrix(xs.size(), 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        l.coords(i, 0) = xs[i];
        l.coords(i, 1) = ys[i];
    }
    return l;
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v == 0.0 ? 0.0 : v);
    return buf;
}

/// Minimal fixed-canvas SVG writer for the three figures.
class SvgCanvas {
public:
    static constexpr double width = 640;
    static constexpr double height = 420;
    static constexpr double left = 60;
    static constexpr double right = 20;
    static constexpr double top = 40;
    static constexpr double bottom = 50;

    SvgCanvas(std::string title, double x0, double x1, double y0, double y1)
        : x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1.0), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1.0) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
             << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
             << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
             << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             << "font-size=\"15\">" << title << "</text>\n";
    }

    double x(double v) const { return left + (v - x0_) / (x1_ - x0_) * (width - left - right); }
    double y(double v) const { return height - bottom - (v - y0_) / (y1_ - y0_) * (height - top - bottom); }
    double sx(double dv) const { return dv / (x1_ - x0_) * (width - left - right); }

    void axes(const std::string& xlabel, const std::string& ylabel) {
        out_ << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
             << height - bottom << "\" stroke=\"black\"/>\n"
             << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
             << "\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double vx = x0_ + (x1_ - x0_) * t / 4.0;
            const double vy = y0_ + (y1_ - y0_) * t / 4.0;
            out_ << "<text x=\"" << fixed(x(vx)) << "\" y=\"" << height - bottom + 16
                 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(vx, 3)
                 << "</text>\n"
                 << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y(vy) + 4)
                 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(vy, 1)
                 << "</text>\n";
        }
        out_ << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel << "</text>\n"
             << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
             << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << ylabel << "</text>\n";
    }

    void bar(double v0, double v1, double count, const std::string& fill) {
        const double px0 = x(v0);
        const double px1 = std::max(x(v1), px0 + 1.0);
        out_ << "<rect x=\"" << fixed(px0) << "\" y=\"" << fixed(y(count)) << "\" width=\"" << fixed(px1 - px0)
             << "\" height=\"" << fixed(y(y0_) - y(count)) << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
    }

    void square(double vx, double vy, const std::string& fill) {
        out_ << "<rect x=\"" << fixed(x(vx) - 4) << "\" y=\"" << fixed(y(vy) - 4)
             << "\" width=\"8\" height=\"8\" fill=\"" << fill << "\"/>\n";
    }

    void dot(double vx, double vy, double radius_px, const std::string& fill) {
        out_ << "<circle cx=\"" << fixed(x(vx)) << "\" cy=\"" << fixed(y(vy)) << "\" r=\"" << fixed(radius_px)
             << "\" fill=\"" << fill << "\"/>\n";
    }

    void ring(double vx, double vy, double radius_px, const std::string& stroke) {
        out_ << "<circle cx=\"" << fixed(x(vx)) << "\" cy=\"" << fixed(y(vy)) << "\" r=\"" << fixed(radius_px)
             << "\" fill=\"" << stroke << "\" fill-opacity=\"0.15\" stroke=\"" << stroke << "\"/>\n";
    }

    void label(double vx, double vy, const std::string& text) {
        out_ << "<text x=\"" << fixed(x(vx) + 6) << "\" y=\"" << fixed(y(vy) - 6)
             << "\" font-family=\"sans-serif\" font-size=\"10\">" << text << "</text>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    double x0_, x1_, y0_, y1_;
    std::ostringstream out_;
};

inline std::string cell(const std::vector<double>& column, std::size_t row) {
    return row < column.size() ? format_double(column[row]) : std::string();
}

}  // namespace detail

struct ReportInputs {
    const DistanceMatrix* distances = nullptr;
    const GroupingResult* grouping = nullptr;
    const Landscape* landscape = nullptr;
    std::vector<double> ratios;          // per sample, Q_K(z) / Q_K(reference)
    std::optional<double> baseline;      // external consensus quality ratio, if supplied
    std::size_t bins = 40;
};

inline const std::vector<std::string>& report_files() {
    static const std::vector<std::string> files = {
        "distance_to_representative.csv", "distance_to_representative.svg",
        "quality_ratio.csv",              "quality_ratio.svg",
        "mds_landscape.csv",              "mds_landscape.svg",
    };
    return files;
}

/// Writes three figure-data CSVs and one SVG per figure into `out_dir`:
/// member-to-representative distances with the nearest-other-representative
/// markers, quality ratios with representative markers and the optional
/// baseline, and the representative landscape with spread circles.
inline std::vector<std::string> emit_report(const ReportInputs& in, const std::string& out_dir) {
    if (!in.distances || !in.grouping || !in.landscape) throw ParameterError("incomplete report inputs");
    const DistanceMatrix& d = *in.distances;
    const GroupingResult& g = *in.grouping;
    if (in.ratios.size() != d.size()) throw DimensionError("one quality ratio per sample is required");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create directory '" + out_dir + "'");

    const auto summary = summarize_grouping(d, g);
    const std::size_t k = summary.size();
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        detail::write_text(path, content);
        written.push_back(path);
    };

    // Distance from each sample to its representative.
    {
        std::vector<char> is_rep(d.size(), 0);
        for (std::size_t r : g.representatives) is_rep[r] = 1;
        std::vector<double> values;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (!is_rep[i]) values.push_back(g.distance[i]);
        // Every sample is a representative (k = m): plot them all.
        const bool include_reps = values.empty();
        if (include_reps) values = g.distance;
        const Histogram h = histogram(values, in.bins);

        std::vector<std::vector<std::size_t>> per_rep;
        for (const auto& r : summary) {
            std::vector<double> mine;
            for (std::size_t idx = 0; idx < r.members.size(); ++idx)
                if (include_reps || !is_rep[r.members[idx]]) mine.push_back(r.member_distances[idx]);
            per_rep.push_back(bin_counts(mine, h.edges));
        }
        std::vector<double> marker_rep;
        std::vector<double> marker_dist;
        for (const auto& r : summary)
            if (r.nearest_other) {
                marker_rep.push_back(static_cast<double>(r.representative));
                marker_dist.push_back(*r.nearest_other);
            }

        std::ostringstream csv;
        csv << "bin_low,bin_high,count";
        for (const auto& r : summary) csv << ",count_rep_" << r.representative;
        csv << ",marker_representative,marker_nearest_representative_distance\n";
        const std::size_t rows = std::max(in.bins, marker_rep.size());
        for (std::size_t row = 0; row < rows; ++row) {
            if (row < in.bins) {
                csv << detail::format_double(h.edges[row]) << ',' << detail::format_double(h.edges[row + 1]) << ','
                    << h.counts[row];
                for (const auto& c : per_rep) csv << ',' << c[row];
            } else {
                csv << ",,";
                for (std::size_t j = 0; j < per_rep.size(); ++j) csv << ',';
            }
            csv << ',' << (row < marker_rep.size() ? std::to_string(static_cast<std::size_t>(marker_rep[row])) : "")
                << ',' << detail::cell(marker_dist, row) << '\n';
        }
        emit("distance_to_representative.csv", csv.str());

        double x1 = h.edges.back();
        for (double m : marker_dist) x1 = std::max(x1, m);
        const double y1 = static_cast<double>(*std::max_element(h.counts.begin(), h.counts.end()));
        detail::SvgCanvas svg("Distance between partition and its representative", std::min(0.0, h.edges.front()),
                              x1, 0.0, y1 * 1.1);
        svg.axes("distance to representative (" + d.kind() + ")", "partitions");
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            svg.bar(h.edges[b], h.edges[b + 1], static_cast<double>(h.counts[b]), "#4c72b0");
        for (double m : marker_dist) svg.square(m, 0.0, "red");
        emit("distance_to_representative.svg", svg.finish());
    }

    // Quality ratio distribution.
    {
        const Histogram h = histogram(in.ratios, in.bins);
        std::vector<double> marker_rep;
        std::vector<double> marker_ratio;
        for (std::size_t r : g.representatives) {
            marker_rep.push_back(static_cast<double>(r));
            marker_ratio.push_back(in.ratios[r]);
        }
        std::ostringstream csv;
        csv << "bin_low,bin_high,count,marker_representative,marker_ratio,baseline_ratio\n";
        const std::size_t rows = std::max(in.bins, k);
        for (std::size_t row = 0; row < rows; ++row) {
            if (row < in.bins)
                csv << detail::format_double(h.edges[row]) << ',' << detail::format_double(h.edges[row + 1]) << ','
                    << h.counts[row];
            else
                csv << ",,";
            csv << ',' << (row < k ? std::to_string(g.representatives[row]) : "") << ','
                << detail::cell(marker_ratio, row) << ','
                << (row == 0 && in.baseline ? detail::format_double(*in.baseline) : "") << '\n';
        }
        emit("quality_ratio.csv", csv.str());

        double x0 = h.edges.front();
        double x1 = h.edges.back();
        if (in.baseline) {
            x0 = std::min(x0, *in.baseline);
            x1 = std::max(x1, *in.baseline);
        }
        const double y1 = static_cast<double>(*std::max_element(h.counts.begin(), h.counts.end()));
        detail::SvgCanvas svg("Quality of partitions", x0, x1, 0.0, y1 * 1.1);
        svg.axes("quality ratio to reference", "partitions");
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            svg.bar(h.edges[b], h.edges[b + 1], static_cast<double>(h.counts[b]), "#55a868");
        for (double r : marker_ratio) svg.square(r, 0.0, "red");
        if (in.baseline) svg.dot(*in.baseline, 0.0, 5.0, "blue");
        emit("quality_ratio.svg", svg.finish());
    }

    // Landscape of representatives.
    {
        const Landscape& l = *in.landscape;
        if (l.representatives.size() != k) throw DimensionError("landscape does not match the grouping");
        std::ostringstream csv;
        csv << "representative,x,y,radius,members,quality_ratio\n";
        for (std::size_t i = 0; i < k; ++i)
            csv << l.representatives[i] << ',' << detail::format_double(l.coords(i, 0)) << ','
                << detail::format_double(l.coords(i, 1)) << ',' << detail::format_double(l.radii[i]) << ','
                << l.members[i] << ',' << detail::format_double(in.ratios[l.representatives[i]]) << '\n';
        emit("mds_landscape.csv", csv.str());

        double lo = 0.0;
        double hi = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < 2; ++c) {
                lo = std::min(lo, l.coords(i, c) - l.radii[i]);
                hi = std::max(hi, l.coords(i, c) + l.radii[i]);
            }
        if (hi <= lo) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = 0.05 * (hi - lo);
        detail::SvgCanvas svg("Landscape of representative partitions (classical MDS)", lo - pad, hi + pad, lo - pad,
                              hi + pad);
        svg.axes("MDS 1", "MDS 2");
        for (std::size_t i = 0; i < k; ++i) {
            svg.ring(l.coords(i, 0), l.coords(i, 1), std::max(2.0, svg.sx(l.radii[i])), "#c44e52");
            svg.dot(l.coords(i, 0), l.coords(i, 1), 3.0, "black");
            svg.label(l.coords(i, 0), l.coords(i, 1), std::to_string(l.representatives[i]));
        }
        emit("mds_landscape.svg", svg.finish());
    }
    return written;
}

}  // namespace partscape
