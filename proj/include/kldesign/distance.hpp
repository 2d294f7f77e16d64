#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "kldesign/design.hpp"

namespace kld {

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

/// Pairwise-distance bookkeeping shared by the nearest-neighbor entropy and
/// mindist objectives: the full n x n distance matrix and each point's
/// nearest-neighbor distance. Single-point swaps are re-evaluated in O(n·d)
/// plus a row rescan for points whose nearest neighbor was the swapped one.
class DistanceState {
public:
    explicit DistanceState(const Design& design)
        : n_(design.n()), dmat_(n_ * n_, 0.0), rho_(n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double dist = euclidean_distance(design.point(i), design.point(j));
                dmat_[i * n_ + j] = dist;
                dmat_[j * n_ + i] = dist;
            }
        for (std::size_t i = 0; i < n_; ++i) rho_[i] = row_min(dmat_.data() + i * n_, i);
    }

    std::size_t n() const { return n_; }
    double dist(std::size_t i, std::size_t j) const { return dmat_[i * n_ + j]; }

    /// Nearest-neighbor distance of each point (0 for exact duplicates).
    const std::vector<double>& nn_distances() const { return rho_; }

    double min_distance() const {
        double m = std::numeric_limits<double>::infinity();
        for (double r : rho_) m = std::min(m, r);
        return m;
    }

    struct SwapEval {
        std::vector<double> new_row;  // distances from every point to the candidate
        std::vector<double> new_rho;  // nearest-neighbor distances after the swap
    };

    /// Distances and NN vector as they would look with row i replaced by y;
    /// the state itself is untouched.
    SwapEval evaluate_swap(const Design& design, std::size_t i, std::span<const double> y) const {
        SwapEval ev;
        ev.new_row.assign(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            ev.new_row[j] = euclidean_distance(design.point(j), y);
        }
        ev.new_rho.assign(n_, 0.0);
        const double* row_i = dmat_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            if (row_i[j] > rho_[j]) {
                // the swapped point was not j's nearest neighbor
                ev.new_rho[j] = std::min(rho_[j], ev.new_row[j]);
            } else {
                const double* row_j = dmat_.data() + j * n_;
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < n_; ++k)
                    if (k != i && k != j) m = std::min(m, row_j[k]);
                ev.new_rho[j] = std::min(m, ev.new_row[j]);
            }
        }
        double mi = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n_; ++j)
            if (j != i) mi = std::min(mi, ev.new_row[j]);
        ev.new_rho[i] = mi;
        return ev;
    }

    /// Commits an evaluated swap: writes the new design row and the new
    /// distance row/column. Must be paired with the evaluate_swap result
    /// for the same (i, y).
    void apply_swap(Design& design, std::size_t i, std::span<const double> y, SwapEval&& ev) {
        for (std::size_t j = 0; j < n_; ++j) {
            dmat_[i * n_ + j] = ev.new_row[j];
            dmat_[j * n_ + i] = ev.new_row[j];
        }
        rho_ = std::move(ev.new_rho);
        design.set_point(i, y);
    }

private:
    double row_min(const double* row, std::size_t self) const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n_; ++j)
            if (j != self) m = std::min(m, row[j]);
        return m;
    }

    std::size_t n_;
    std::vector<double> dmat_;
    std::vector<double> rho_;
};

/// Smallest pairwise Euclidean distance; 0 when the design has duplicates.
inline double mindist(const Design& design) {
    if (design.n() < 2) throw std::invalid_argument("mindist: n must be >= 2");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < design.n(); ++i)
        for (std::size_t j = i + 1; j < design.n(); ++j)
            m = std::min(m, euclidean_distance(design.point(i), design.point(j)));
    return m;
}

}  // namespace kld
