#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kldesign/design.hpp"
#include "kldesign/distance.hpp"

namespace kld {

class DegenerateDesignError : public std::runtime_error {
public:
    DegenerateDesignError()
        : std::runtime_error("degenerate design: all nearest-neighbor distances are zero") {}
};

/// Coverage measure: dispersion of the nearest-neighbor distances,
/// (1/mean) * sqrt((1/n) sum (g_i - mean)^2). Zero exactly when every point
/// sits at the same distance from its nearest neighbor, as on a regular
/// grid.
inline double coverage(const Design& design) {
    if (design.n() < 2) throw std::invalid_argument("coverage: n must be >= 2");
    const DistanceState distances(design);
    const auto& gamma = distances.nn_distances();
    const double n = static_cast<double>(design.n());
    double mean = 0.0;
    for (double g : gamma) mean += g;
    mean /= n;
    if (mean == 0.0) throw DegenerateDesignError();
    double var = 0.0;
    for (double g : gamma) var += (g - mean) * (g - mean);
    var /= n;
    return std::sqrt(var) / mean;
}

/// L2 star discrepancy (Warnock form): distance between the empirical
/// distribution of the points and the uniform law over anchored boxes
/// [0, t).
inline double discrepancy_l2(const Design& design) {
    const std::size_t n = design.n();
    const std::size_t d = design.d();
    const double nn = static_cast<double>(n);

    double sum1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double prod = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double x = design(i, k);
            prod *= 1.0 - x * x;
        }
        sum1 += prod;
    }

    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double prod = 1.0;
            for (std::size_t k = 0; k < d; ++k)
                prod *= 1.0 - std::max(design(i, k), design(j, k));
            sum2 += prod;
        }

    const double dsq = std::pow(3.0, -static_cast<double>(d)) -
                       std::ldexp(1.0, 1 - static_cast<int>(d)) / nn * sum1 +
                       sum2 / (nn * nn);
    return std::sqrt(std::max(dsq, 0.0));
}

/// Centered L2 discrepancy (Hickernell closed form): boxes are anchored at
/// the nearest cube vertex, summed over all coordinate projections.
inline double discrepancy_centered_l2(const Design& design) {
    const std::size_t n = design.n();
    const std::size_t d = design.d();
    const double nn = static_cast<double>(n);

    double sum1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double prod = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double a = std::abs(design(i, k) - 0.5);
            prod *= 1.0 + 0.5 * a - 0.5 * a * a;
        }
        sum1 += prod;
    }

    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double prod = 1.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double ai = std::abs(design(i, k) - 0.5);
                const double aj = std::abs(design(j, k) - 0.5);
                prod *= 1.0 + 0.5 * ai + 0.5 * aj - 0.5 * std::abs(design(i, k) - design(j, k));
            }
            sum2 += prod;
        }

    const double dsq = std::pow(13.0 / 12.0, static_cast<double>(d)) - 2.0 / nn * sum1 +
                       sum2 / (nn * nn);
    return std::sqrt(std::max(dsq, 0.0));
}

/// Euclidean minimum spanning tree edge lengths via dense Prim in O(n^2);
/// index-order tie breaking keeps runs deterministic.
inline std::vector<double> mst_edge_lengths(const Design& design) {
    const std::size_t n = design.n();
    if (n < 2) throw std::invalid_argument("mst: n must be >= 2");
    std::vector<bool> in_tree(n, false);
    std::vector<double> key(n, std::numeric_limits<double>::infinity());
    std::vector<double> edges;
    edges.reserve(n - 1);

    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j)
        key[j] = euclidean_distance(design.point(0), design.point(j));

    for (std::size_t step = 1; step < n; ++step) {
        std::size_t u = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j] && key[j] < best) {
                best = key[j];
                u = j;
            }
        if (u == n) {  // no finite key (NaN coordinates); take the first remaining
            for (std::size_t j = 0; j < n; ++j)
                if (!in_tree[j]) { u = j; best = key[j]; break; }
        }
        in_tree[u] = true;
        edges.push_back(best);
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j]) {
                const double dist = euclidean_distance(design.point(u), design.point(j));
                if (dist < key[j]) key[j] = dist;
            }
    }
    return edges;
}

/// Mean and population standard deviation of the MST edge lengths.
inline std::pair<double, double> mst_stats(const Design& design) {
    const auto edges = mst_edge_lengths(design);
    const double m = static_cast<double>(edges.size());
    double mean = 0.0;
    for (double e : edges) mean += e;
    mean /= m;
    double var = 0.0;
    for (double e : edges) var += (e - mean) * (e - mean);
    var /= m;
    return {mean, std::sqrt(var)};
}

struct CriteriaReport {
    double cov = 0.0;
    double mindist = 0.0;
    double dl2 = 0.0;
    double dc2 = 0.0;
    double mst_mean = 0.0;
    double mst_std = 0.0;

    friend bool operator==(const CriteriaReport&, const CriteriaReport&) = default;
};

inline CriteriaReport evaluate_all(const Design& design) {
    if (design.n() < 2) throw std::invalid_argument("evaluate_all: n must be >= 2");
    CriteriaReport report;
    report.cov = coverage(design);
    report.mindist = mindist(design);
    report.dl2 = discrepancy_l2(design);
    report.dc2 = discrepancy_centered_l2(design);
    const auto [mst_mean, mst_std] = mst_stats(design);
    report.mst_mean = mst_mean;
    report.mst_std = mst_std;
    return report;
}

inline std::string to_json(const CriteriaReport& report) {
    nlohmann::json j{{"cov", report.cov},         {"mindist", report.mindist},
                     {"dl2", report.dl2},         {"dc2", report.dc2},
                     {"mst_mean", report.mst_mean}, {"mst_std", report.mst_std}};
    return j.dump();
}

inline CriteriaReport criteria_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    CriteriaReport report;
    report.cov = j.at("cov").get<double>();
    report.mindist = j.at("mindist").get<double>();
    report.dl2 = j.at("dl2").get<double>();
    report.dc2 = j.at("dc2").get<double>();
    report.mst_mean = j.at("mst_mean").get<double>();
    report.mst_std = j.at("mst_std").get<double>();
    return report;
}

inline constexpr const char* criteria_csv_header = "cov,mindist,dl2,dc2,mst_mean,mst_std";

inline std::string to_csv_row(const CriteriaReport& report) {
    return detail::format_double(report.cov) + "," + detail::format_double(report.mindist) + "," +
           detail::format_double(report.dl2) + "," + detail::format_double(report.dc2) + "," +
           detail::format_double(report.mst_mean) + "," + detail::format_double(report.mst_std);
}

inline CriteriaReport criteria_from_csv_row(const std::string& row) {
    const auto fields = detail::split_csv_line(row);
    if (fields.size() != 6) throw ParseError("criteria row: expected 6 fields");
    const auto parse = [&](std::size_t k) {
        double v = 0.0;
        if (!detail::parse_double(detail::trim(fields[k]), v))
            throw ParseError("criteria row: non-numeric field " + std::to_string(k));
        return v;
    };
    CriteriaReport report;
    report.cov = parse(0);
    report.mindist = parse(1);
    report.dl2 = parse(2);
    report.dc2 = parse(3);
    report.mst_mean = parse(4);
    report.mst_std = parse(5);
    return report;
}

}  // namespace kld
