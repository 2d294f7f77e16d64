#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>

#include "kldesign/rng.hpp"

namespace kld {

enum class KernelFamily { gaussian, epanechnikov_spherical, epanechnikov_product };

/// Fixed bandwidth for KDE on the unit cube: Scott's rule with the standard
/// deviation of the uniform law, h = (1/sqrt(12)) * n^(-1/(d+4)). Constant
/// for fixed (n, d), so the estimator bias does not move during exchanges.
inline double bandwidth(std::size_t n, std::size_t d) {
    if (n < 2) throw std::invalid_argument("bandwidth: n must be >= 2");
    if (d < 1) throw std::invalid_argument("bandwidth: d must be >= 1");
    return (1.0 / std::sqrt(12.0)) *
           std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
}

/// Volume of the d-dimensional unit ball, via the even/odd factorial forms:
/// d=2p:   pi^p / p!
/// d=2p+1: pi^p * 2^(2p) * p! / ((2p)! * (p+1/2))
inline double unit_ball_volume(std::size_t d) {
    if (d < 1) throw std::invalid_argument("unit_ball_volume: d must be >= 1");
    if (d > 170) throw std::invalid_argument("unit_ball_volume: d too large");
    const std::size_t p = d / 2;
    double fact_p = 1.0;
    for (std::size_t i = 2; i <= p; ++i) fact_p *= static_cast<double>(i);
    const double pi_p = std::pow(std::numbers::pi, static_cast<double>(p));
    if (d % 2 == 0) return pi_p / fact_p;
    double fact_2p = 1.0;
    for (std::size_t i = 2; i <= 2 * p; ++i) fact_2p *= static_cast<double>(i);
    return pi_p * std::ldexp(1.0, static_cast<int>(2 * p)) * fact_p /
           (fact_2p * (static_cast<double>(p) + 0.5));
}

/// Normalization constant of the spherical Epanechnikov kernel,
/// 1 / integral_{||x||<=1} (1-||x||^2) dx. Analytic for d <= 3; Monte-Carlo
/// beyond: sample the positive orthant of the cube, reject outside the unit
/// ball, average 1-||x||^2 over accepted points, scale by V_d / count.
/// Ten independent repetitions are averaged, with draws scaled so the
/// estimate rests on at least 1e5 accepted samples overall.
inline double epanechnikov_alpha(std::size_t d, SeededRng& rng) {
    if (d < 1) throw std::invalid_argument("epanechnikov_alpha: d must be >= 1");
    if (d == 1) return 3.0 / 4.0;
    if (d == 2) return 2.0 / std::numbers::pi;
    if (d == 3) return 15.0 / (8.0 * std::numbers::pi);

    const double volume = unit_ball_volume(d);
    const double accept_rate = volume / std::ldexp(1.0, static_cast<int>(d));
    const std::size_t reps = 10;
    const std::size_t draws =
        std::max<std::size_t>(100000, static_cast<std::size_t>(std::ceil(10000.0 / accept_rate)));

    double mean_integral = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        double sum = 0.0;
        std::size_t accepted = 0;
        for (std::size_t i = 0; i < draws; ++i) {
            double norm2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double c = rng.uniform();
                norm2 += c * c;
            }
            if (norm2 <= 1.0) {
                sum += 1.0 - norm2;
                ++accepted;
            }
        }
        if (accepted == 0) throw std::runtime_error("epanechnikov_alpha: no accepted samples");
        mean_integral += volume * sum / static_cast<double>(accepted) / static_cast<double>(reps);
    }
    return 1.0 / mean_integral;
}

/// Kernel family plus bandwidth and the family's internal constant:
/// gaussian carries s2 = d/12, Epanechnikov carries its normalization
/// (per-axis 3/4 for the product form). Built through the factories so the
/// constants stay consistent with the dimension.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    std::size_t dim = 0;
    double h = 0.0;
    double s2 = 0.0;          // gaussian internal variance
    double alpha = 0.0;       // epanechnikov normalization
    double gauss_norm = 0.0;  // (2*pi)^(-d/2) / s^d, precomputed

    static KernelSpec gaussian(std::size_t d, double h) {
        check(d, h);
        KernelSpec k;
        k.family = KernelFamily::gaussian;
        k.dim = d;
        k.h = h;
        k.s2 = static_cast<double>(d) / 12.0;
        k.gauss_norm = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) /
                       std::pow(std::sqrt(k.s2), static_cast<double>(d));
        return k;
    }

    static KernelSpec epanechnikov_spherical(std::size_t d, double h, double alpha) {
        check(d, h);
        if (!(alpha > 0.0)) throw std::invalid_argument("KernelSpec: alpha must be positive");
        KernelSpec k;
        k.family = KernelFamily::epanechnikov_spherical;
        k.dim = d;
        k.h = h;
        k.alpha = alpha;
        return k;
    }

    static KernelSpec epanechnikov_spherical(std::size_t d, double h, SeededRng& rng) {
        return epanechnikov_spherical(d, h, epanechnikov_alpha(d, rng));
    }

    static KernelSpec epanechnikov_product(std::size_t d, double h) {
        check(d, h);
        KernelSpec k;
        k.family = KernelFamily::epanechnikov_product;
        k.dim = d;
        k.h = h;
        k.alpha = 3.0 / 4.0;  // per-axis factor
        return k;
    }

private:
    static void check(std::size_t d, double h) {
        if (d < 1) throw std::invalid_argument("KernelSpec: d must be >= 1");
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("KernelSpec: bandwidth must be positive and finite");
    }
};

inline double kernel_eval(const KernelSpec& kernel, std::span<const double> z) {
    if (z.size() != kernel.dim) throw std::invalid_argument("kernel_eval: dimension mismatch");
    switch (kernel.family) {
        case KernelFamily::gaussian: {
            double norm2 = 0.0;
            for (double zk : z) norm2 += zk * zk;
            return kernel.gauss_norm * std::exp(-norm2 / (2.0 * kernel.s2));
        }
        case KernelFamily::epanechnikov_spherical: {
            double norm2 = 0.0;
            for (double zk : z) norm2 += zk * zk;
            return norm2 <= 1.0 ? kernel.alpha * (1.0 - norm2) : 0.0;
        }
        case KernelFamily::epanechnikov_product: {
            double prod = 1.0;
            for (double zk : z) {
                if (zk < -1.0 || zk > 1.0) return 0.0;
                prod *= kernel.alpha * (1.0 - zk * zk);
            }
            return prod;
        }
    }
    return 0.0;
}

/// Probability that a bounded kernel sees a neighbor, P(||z||^2 <= 1) =
/// h^2/d with h from the bandwidth rule. A diagnostic, not a theorem: it
/// treats ||z||^2 as uniform on [0, d/h^2], which is a back-of-envelope
/// approximation (a sum of squared uniform differences is not uniform).
inline double kernel_support_probability(std::size_t n, std::size_t d) {
    const double h = bandwidth(n, d);
    return h * h / static_cast<double>(d);
}

}  // namespace kld
