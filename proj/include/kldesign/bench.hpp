#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kldesign/criteria.hpp"
#include "kldesign/generators.hpp"

namespace kld {

struct BenchConfig {
    std::vector<Method> methods;
    std::size_t n = 0;  // 0 means 10*d
    std::size_t d = 1;
    std::size_t reps = 20;
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t max_proposals = 0;          // 0 means 1000*d
    std::size_t max_consecutive_rejects = 0;  // 0 means 100*d
};

struct BenchRow {
    Method method = Method::random;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::optional<CriteriaReport> criteria;
    std::optional<double> objective;  // optimized methods only
    double wall_s = 0.0;
    std::string error;  // non-empty marks a failed row
};

struct MethodSummary {
    Method method = Method::random;
    std::size_t rows_used = 0;
    CriteriaReport mean;
    CriteriaReport stddev;  // population standard deviation
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRow> rows;
    std::vector<MethodSummary> summaries;
};

namespace detail {

inline std::size_t method_ordinal(Method m) {
    for (std::size_t i = 0; i < all_methods.size(); ++i)
        if (all_methods[i] == m) return i;
    return 0;
}

inline MethodSummary summarize(Method method, const std::vector<BenchRow>& rows) {
    MethodSummary s;
    s.method = method;
    std::vector<const CriteriaReport*> ok;
    for (const auto& row : rows)
        if (row.method == method && row.criteria) ok.push_back(&*row.criteria);
    s.rows_used = ok.size();
    if (ok.empty()) return s;
    const double m = static_cast<double>(ok.size());

    auto accumulate = [&](auto field) {
        double mean = 0.0;
        for (const auto* r : ok) mean += r->*field;
        mean /= m;
        double var = 0.0;
        for (const auto* r : ok) var += (r->*field - mean) * (r->*field - mean);
        var /= m;
        return std::pair{mean, std::sqrt(var)};
    };
    std::tie(s.mean.cov, s.stddev.cov) = accumulate(&CriteriaReport::cov);
    std::tie(s.mean.mindist, s.stddev.mindist) = accumulate(&CriteriaReport::mindist);
    std::tie(s.mean.dl2, s.stddev.dl2) = accumulate(&CriteriaReport::dl2);
    std::tie(s.mean.dc2, s.stddev.dc2) = accumulate(&CriteriaReport::dc2);
    std::tie(s.mean.mst_mean, s.stddev.mst_mean) = accumulate(&CriteriaReport::mst_mean);
    std::tie(s.mean.mst_std, s.stddev.mst_std) = accumulate(&CriteriaReport::mst_std);
    return s;
}

}  // namespace detail

/// Replicate seed for (method, rep): contiguous per-method blocks so a
/// method's rows do not depend on which other methods ran, and every row is
/// replayable verbatim via `generate --seed <row seed>`.
inline std::uint64_t bench_row_seed(std::uint64_t base_seed, Method method, std::size_t reps,
                                    std::size_t rep) {
    return base_seed + detail::method_ordinal(method) * reps + rep;
}

/// Runs the full comparison: for every method x replicate, generates a
/// design and scores the criteria battery. A failing row is recorded with
/// its error and the run continues.
inline BenchReport run_bench(const BenchConfig& config) {
    if (config.methods.empty()) throw std::invalid_argument("run_bench: no methods");
    if (config.reps < 1) throw std::invalid_argument("run_bench: reps must be >= 1");

    BenchReport report;
    report.config = config;
    for (Method method : config.methods) {
        for (std::size_t rep = 0; rep < config.reps; ++rep) {
            BenchRow row;
            row.method = method;
            row.rep = rep;
            row.seed = bench_row_seed(config.seed, method, config.reps, rep);
            const auto start = std::chrono::steady_clock::now();
            try {
                GeneratorSpec spec;
                spec.method = method;
                spec.n = config.n;
                spec.d = config.d;
                spec.seed = row.seed;
                spec.opt.restarts = config.restarts;
                spec.opt.max_proposals = config.max_proposals;
                spec.opt.max_consecutive_rejects = config.max_consecutive_rejects;
                auto generated = generate(spec);
                row.objective = generated.objective;
                row.criteria = evaluate_all(generated.design);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
            report.rows.push_back(std::move(row));
        }
    }
    for (Method method : config.methods)
        report.summaries.push_back(detail::summarize(method, report.rows));
    return report;
}

inline constexpr const char* bench_rows_csv_header =
    "method,rep,seed,cov,mindist,dl2,dc2,mst_mean,mst_std,objective,wall_s";

inline std::string format_bench_row(const BenchRow& row) {
    std::string out;
    out += method_name(row.method);
    out += "," + std::to_string(row.rep) + "," + std::to_string(row.seed) + ",";
    if (row.criteria) {
        out += to_csv_row(*row.criteria);
    } else {
        out += ",,,,,";  // six empty criteria fields
    }
    out += ",";
    if (!row.error.empty())
        out += "error";
    else if (row.objective)
        out += detail::format_double(*row.objective);
    out += "," + detail::format_double(row.wall_s);
    return out;
}

inline void write_bench_rows_csv(const BenchReport& report, std::ostream& out) {
    out << bench_rows_csv_header << "\n";
    for (const auto& row : report.rows) out << format_bench_row(row) << "\n";
}

inline constexpr const char* bench_summary_csv_header =
    "method,rows,cov_mean,cov_std,mindist_mean,mindist_std,dl2_mean,dl2_std,dc2_mean,dc2_std,"
    "mst_mean_mean,mst_mean_std,mst_std_mean,mst_std_std";

inline void write_bench_summary_csv(const BenchReport& report, std::ostream& out) {
    out << bench_summary_csv_header << "\n";
    for (const auto& s : report.summaries) {
        out << method_name(s.method) << "," << s.rows_used;
        const auto emit = [&](double mean, double std) {
            out << "," << detail::format_double(mean) << "," << detail::format_double(std);
        };
        emit(s.mean.cov, s.stddev.cov);
        emit(s.mean.mindist, s.stddev.mindist);
        emit(s.mean.dl2, s.stddev.dl2);
        emit(s.mean.dc2, s.stddev.dc2);
        emit(s.mean.mst_mean, s.stddev.mst_mean);
        emit(s.mean.mst_std, s.stddev.mst_std);
        out << "\n";
    }
}

inline void write_bench_csvs(const BenchReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream rows(out_dir / "rows.csv");
        if (!rows) throw std::runtime_error("cannot write " + (out_dir / "rows.csv").string());
        write_bench_rows_csv(report, rows);
    }
    {
        std::ofstream summary(out_dir / "summary.csv");
        if (!summary)
            throw std::runtime_error("cannot write " + (out_dir / "summary.csv").string());
        write_bench_summary_csv(report, summary);
    }
}

}  // namespace kld
