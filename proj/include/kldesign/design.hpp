#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kldesign/rng.hpp"

namespace kld {

/// n points in the unit hypercube [0,1]^d, stored row-major. The shape is
/// fixed at construction; row order is point identity. Values are not
/// range-checked here: validate() reports violations, file parsing
/// rejects them.
class Design {
public:
    Design(std::size_t n, std::size_t d)
        : n_(n), d_(d), points_(n * d, 0.0) {
        check_shape(n, d);
    }

    Design(std::size_t n, std::size_t d, std::vector<double> points)
        : n_(n), d_(d), points_(std::move(points)) {
        check_shape(n, d);
        if (points_.size() != n * d)
            throw std::invalid_argument("Design: points size does not match n*d");
    }

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }

    double operator()(std::size_t i, std::size_t k) const { return points_[i * d_ + k]; }
    double& operator()(std::size_t i, std::size_t k) { return points_[i * d_ + k]; }

    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * d_, d_};
    }

    void set_point(std::size_t i, std::span<const double> p) {
        if (p.size() != d_) throw std::invalid_argument("set_point: dimension mismatch");
        for (std::size_t k = 0; k < d_; ++k) points_[i * d_ + k] = p[k];
    }

    const std::vector<double>& data() const { return points_; }

    friend bool operator==(const Design&, const Design&) = default;

private:
    static void check_shape(std::size_t n, std::size_t d) {
        if (n < 1) throw std::invalid_argument("Design: n must be >= 1");
        if (d < 1) throw std::invalid_argument("Design: d must be >= 1");
    }

    std::size_t n_;
    std::size_t d_;
    std::vector<double> points_;
};

struct RangeViolation {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Out-of-range coordinates are errors; exact duplicate rows are legal but
/// worth flagging (random initialization can collide in principle).
struct ValidationReport {
    std::vector<RangeViolation> out_of_range;
    std::vector<std::pair<std::size_t, std::size_t>> duplicate_pairs;
    bool ok() const { return out_of_range.empty(); }
};

inline ValidationReport validate(const Design& design) {
    ValidationReport report;
    for (std::size_t i = 0; i < design.n(); ++i)
        for (std::size_t k = 0; k < design.d(); ++k) {
            const double v = design(i, k);
            if (!(v >= 0.0 && v <= 1.0)) report.out_of_range.push_back({i, k, v});
        }
    for (std::size_t i = 0; i < design.n(); ++i)
        for (std::size_t j = i + 1; j < design.n(); ++j) {
            bool same = true;
            for (std::size_t k = 0; k < design.d(); ++k)
                if (design(i, k) != design(j, k)) { same = false; break; }
            if (same) report.duplicate_pairs.emplace_back(i, j);
        }
    return report;
}

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// locale-independent formatting, 17 significant digits round-trips doubles
inline std::string format_double(double v) {
    char buf[40];
    const auto result = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, result.ptr);
}

// locale-independent strict parse; the whole token must be consumed
inline bool parse_double(const std::string& token, double& out) {
    if (token.empty()) return false;
    const char* end = token.data() + token.size();
    const auto result = std::from_chars(token.data(), end, out);
    return result.ec == std::errc{} && result.ptr == end;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// CSV: header x1,...,xd then one point per row, 17 significant digits so
/// the decimal text round-trips bit-exactly.
inline void write_design(const Design& design, std::ostream& out) {
    for (std::size_t k = 0; k < design.d(); ++k)
        out << (k ? "," : "") << "x" << (k + 1);
    out << "\n";
    for (std::size_t i = 0; i < design.n(); ++i) {
        for (std::size_t k = 0; k < design.d(); ++k) {
            if (k) out << ",";
            out << detail::format_double(design(i, k));
        }
        out << "\n";
    }
}

inline void write_design(const Design& design, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    write_design(design, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Parses a design CSV. Errors name the offending data row (0-based) and
/// column: malformed width, non-numeric token, or coordinate outside [0,1].
inline Design read_design(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("no data rows");
    const auto header = detail::split_csv_line(line);
    const std::size_t d = header.size();
    for (std::size_t k = 0; k < d; ++k) {
        if (detail::trim(header[k]) != "x" + std::to_string(k + 1))
            throw ParseError("bad header: expected x1,...,x" + std::to_string(d));
    }

    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != d)
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(d) +
                             " columns, got " + std::to_string(fields.size()));
        for (std::size_t k = 0; k < d; ++k) {
            const std::string token = detail::trim(fields[k]);
            double v = 0.0;
            if (!detail::parse_double(token, v))
                throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(k) +
                                 ": non-numeric token '" + token + "'");
            if (!(v >= 0.0 && v <= 1.0))
                throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(k) +
                                 ": value " + token + " outside [0,1]");
            values.push_back(v);
        }
        ++row;
    }
    if (row == 0) throw ParseError("no data rows");
    return Design(row, d, std::move(values));
}

inline Design read_design(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return read_design(in);
}

/// One uniform draw in [0,1]^d; advances the generator d times.
inline std::vector<double> uniform_point(SeededRng& rng, std::size_t d) {
    if (d < 1) throw std::invalid_argument("uniform_point: d must be >= 1");
    std::vector<double> p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = rng.uniform();
    return p;
}

}  // namespace kld
