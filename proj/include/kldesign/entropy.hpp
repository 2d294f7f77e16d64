#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/distance.hpp"
#include "kldesign/kernels.hpp"

namespace kld {

/// Euler-Mascheroni constant, used by the nearest-neighbor estimator.
inline constexpr double euler_constant = 0.57721566490153286;

/// Raised when a nearest-neighbor distance is zero (duplicate points make
/// ln(rho) undefined). The optimizer treats such candidates as objective
/// minus infinity.
class ZeroDistanceError : public std::runtime_error {
public:
    ZeroDistanceError() : std::runtime_error("zero-distance: duplicate points in design") {}
};

/// Raised when a density value is not strictly positive, so ln(f) is
/// undefined. With a bounded kernel this is the estimator's known failure
/// mode; the resubstitution self term normally prevents it.
class DegenerateKernelError : public std::runtime_error {
public:
    DegenerateKernelError() : std::runtime_error("degenerate-kernel: estimated density is zero") {}
};

/// KDE density at an arbitrary point: f(x) = 1/(n h^d) sum_i K((x-X_i)/h).
inline double kde_density(const Design& design, const KernelSpec& kernel,
                          std::span<const double> x) {
    const std::size_t n = design.n();
    const std::size_t d = design.d();
    std::vector<double> z(d);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = design.point(i);
        for (std::size_t k = 0; k < d; ++k) z[k] = (x[k] - xi[k]) / kernel.h;
        sum += kernel_eval(kernel, z);
    }
    return sum / (static_cast<double>(n) * std::pow(kernel.h, static_cast<double>(d)));
}

/// Resubstitution KDE entropy state: the kernel matrix K((X_i-X_j)/h), the
/// density at every design point (self term included), and the current
/// estimate H = -(1/n) sum ln f(X_i). A single-point swap re-evaluates in
/// O(n·d): one kernel row, a delta per density, a fresh log sum.
class KdeState {
public:
    KdeState(const Design& design, const KernelSpec& kernel)
        : kernel_(kernel), n_(design.n()), d_(design.d()),
          inv_nhd_(1.0 / (static_cast<double>(design.n()) *
                          std::pow(kernel.h, static_cast<double>(design.d())))),
          kmat_(design.n() * design.n(), 0.0), density_(design.n(), 0.0) {
        if (n_ < 2) throw std::invalid_argument("KdeState: n must be >= 2");
        if (kernel.dim != d_) throw std::invalid_argument("KdeState: kernel dimension mismatch");
        std::vector<double> z(d_);
        for (std::size_t i = 0; i < n_; ++i) {
            kmat_[i * n_ + i] = kernel_at_zero();
            for (std::size_t j = i + 1; j < n_; ++j) {
                const auto xi = design.point(i);
                const auto xj = design.point(j);
                for (std::size_t k = 0; k < d_; ++k) z[k] = (xi[k] - xj[k]) / kernel_.h;
                const double v = kernel_eval(kernel_, z);
                kmat_[i * n_ + j] = v;
                kmat_[j * n_ + i] = v;
            }
        }
        for (std::size_t i = 0; i < n_; ++i) {
            double sum = 0.0;
            const double* row = kmat_.data() + i * n_;
            for (std::size_t j = 0; j < n_; ++j) sum += row[j];
            density_[i] = inv_nhd_ * sum;
        }
        entropy_ = entropy_of(density_);
    }

    double entropy() const { return entropy_; }
    const KernelSpec& kernel() const { return kernel_; }
    const std::vector<double>& density() const { return density_; }
    double kmat(std::size_t i, std::size_t j) const { return kmat_[i * n_ + j]; }

    /// Entropy of the design with row i replaced by y; the state is not
    /// modified. Throws DegenerateKernelError if a candidate density is not
    /// strictly positive.
    double entropy_after_swap(const Design& design, std::size_t i,
                              std::span<const double> y) const {
        std::vector<double> new_row = kernel_row(design, i, y);
        const double* old_row = kmat_.data() + i * n_;
        double sum_i = 0.0;
        for (std::size_t j = 0; j < n_; ++j) sum_i += new_row[j];
        const double density_i = inv_nhd_ * sum_i;
        // log sum in index order, matching entropy_of, so an identity swap
        // reproduces the current entropy bit for bit
        double log_sum = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            const double dj =
                j == i ? density_i : density_[j] + inv_nhd_ * (new_row[j] - old_row[j]);
            if (!(dj > 0.0)) throw DegenerateKernelError();
            log_sum += std::log(dj);
        }
        return -log_sum / static_cast<double>(n_);
    }

    /// Commits the swap: writes row i of the design, updates the kernel
    /// matrix row/column, every density, and the entropy.
    void apply_swap(Design& design, std::size_t i, std::span<const double> y) {
        std::vector<double> new_row = kernel_row(design, i, y);
        const double* old_row = kmat_.data() + i * n_;
        double density_i = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            density_i += new_row[j];
            if (j != i) density_[j] += inv_nhd_ * (new_row[j] - old_row[j]);
        }
        density_[i] = inv_nhd_ * density_i;
        for (std::size_t j = 0; j < n_; ++j) {
            kmat_[i * n_ + j] = new_row[j];
            kmat_[j * n_ + i] = new_row[j];
        }
        design.set_point(i, y);
        entropy_ = entropy_of(density_);
    }

private:
    double kernel_at_zero() const {
        std::vector<double> zero(d_, 0.0);
        return kernel_eval(kernel_, zero);
    }

    std::vector<double> kernel_row(const Design& design, std::size_t i,
                                   std::span<const double> y) const {
        std::vector<double> row(n_, 0.0);
        std::vector<double> z(d_);
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) {
                row[j] = kernel_at_zero();
                continue;
            }
            const auto xj = design.point(j);
            for (std::size_t k = 0; k < d_; ++k) z[k] = (y[k] - xj[k]) / kernel_.h;
            row[j] = kernel_eval(kernel_, z);
        }
        return row;
    }

    double entropy_of(const std::vector<double>& density) const {
        double log_sum = 0.0;
        for (double f : density) {
            if (!(f > 0.0)) throw DegenerateKernelError();
            log_sum += std::log(f);
        }
        return -log_sum / static_cast<double>(n_);
    }

    KernelSpec kernel_;
    std::size_t n_;
    std::size_t d_;
    double inv_nhd_;
    std::vector<double> kmat_;
    std::vector<double> density_;
    double entropy_ = 0.0;
};

/// Monte-Carlo entropy estimate with the sample itself as integration
/// points: H = -(1/n) sum ln f(X_i).
inline std::pair<double, KdeState> entropy_mc(const Design& design, const KernelSpec& kernel) {
    KdeState state(design, kernel);
    return {state.entropy(), std::move(state)};
}

inline double entropy_mc_value(const Design& design, const KernelSpec& kernel) {
    return KdeState(design, kernel).entropy();
}

/// Monte-Carlo entropy estimate over fresh uniform points:
/// H = -(1/N) sum f(Z_i) ln f(Z_i), Z_i uniform on [0,1]^d. Zero-density
/// terms contribute 0 (the limit of x ln x). Study tool only; too slow to
/// drive the exchange loop for d >= 2.
template <typename DensityFn>
double entropy_mc_uniform(DensityFn&& density, std::size_t d, std::size_t num_samples,
                          SeededRng& rng) {
    if (num_samples < 1) throw std::invalid_argument("entropy_mc_uniform: N must be >= 1");
    double sum = 0.0;
    std::vector<double> z(d);
    for (std::size_t i = 0; i < num_samples; ++i) {
        for (std::size_t k = 0; k < d; ++k) z[k] = rng.uniform();
        const double f = density(std::span<const double>(z));
        if (f > 0.0) sum += f * std::log(f);
    }
    return -sum / static_cast<double>(num_samples);
}

inline double entropy_mc_uniform(const Design& design, const KernelSpec& kernel,
                                 std::size_t num_samples, SeededRng& rng) {
    return entropy_mc_uniform(
        [&](std::span<const double> x) { return kde_density(design, kernel, x); }, design.d(),
        num_samples, rng);
}

/// Nearest-neighbor entropy state (Kozachenko-Leonenko, k = 1):
/// H = (d/n) sum ln rho_i + ln V_d + C_E + ln(n-1),
/// rho_i the Euclidean distance from X_i to its nearest neighbor.
/// Duplicate points make the estimate undefined and raise ZeroDistanceError.
class NnState {
public:
    explicit NnState(const Design& design)
        : n_(design.n()), d_(design.d()),
          constant_(std::log(unit_ball_volume(design.d())) + euler_constant +
                    std::log(static_cast<double>(design.n()) - 1.0)),
          distances_(design) {
        if (n_ < 2) throw std::invalid_argument("NnState: n must be >= 2");
        entropy_ = entropy_of(distances_.nn_distances());
    }

    double entropy() const { return entropy_; }
    const std::vector<double>& nn_distances() const { return distances_.nn_distances(); }
    double dist(std::size_t i, std::size_t j) const { return distances_.dist(i, j); }

    /// Entropy of the design with row i replaced by y; state untouched.
    /// Throws ZeroDistanceError if the swap creates a duplicate.
    double entropy_after_swap(const Design& design, std::size_t i,
                              std::span<const double> y) const {
        const auto ev = distances_.evaluate_swap(design, i, y);
        return entropy_of(ev.new_rho);
    }

    /// Commits the swap into design and state. Strong guarantee: on
    /// ZeroDistanceError nothing is modified.
    void apply_swap(Design& design, std::size_t i, std::span<const double> y) {
        auto ev = distances_.evaluate_swap(design, i, y);
        const double new_entropy = entropy_of(ev.new_rho);
        distances_.apply_swap(design, i, y, std::move(ev));
        entropy_ = new_entropy;
    }

private:
    double entropy_of(const std::vector<double>& rho) const {
        double log_sum = 0.0;
        for (double r : rho) {
            if (!(r > 0.0)) throw ZeroDistanceError();
            log_sum += std::log(r);
        }
        return static_cast<double>(d_) / static_cast<double>(n_) * log_sum + constant_;
    }

    std::size_t n_;
    std::size_t d_;
    double constant_;
    DistanceState distances_;
    double entropy_ = 0.0;
};

inline std::pair<double, NnState> entropy_nn(const Design& design) {
    NnState state(design);
    return {state.entropy(), std::move(state)};
}

inline double entropy_nn_value(const Design& design) { return NnState(design).entropy(); }

}  // namespace kld
