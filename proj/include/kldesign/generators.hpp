#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kldesign/design.hpp"
#include "kldesign/optimizer.hpp"
#include "kldesign/rng.hpp"

namespace kld {

/// n i.i.d. uniform points in [0,1]^d.
inline Design gen_random(std::size_t n, std::size_t d, SeededRng& rng) {
    Design design(n, d);
    for (std::size_t i = 0; i < n; ++i) design.set_point(i, uniform_point(rng, d));
    return design;
}

/// Latin hypercube (Stein-style): per dimension an independent uniform
/// permutation of {1..n}, each point placed uniformly inside its stratum,
/// x_ik = (pi_k(i) - u_ik)/n with u_ik in (0,1). Exactly one point per
/// axis stratum [(j-1)/n, j/n) in every dimension.
inline Design gen_lhs(std::size_t n, std::size_t d, SeededRng& rng) {
    Design design(n, d);
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < d; ++k) {
        std::iota(perm.begin(), perm.end(), std::size_t{1});
        for (std::size_t i = n; i > 1; --i)  // Fisher-Yates
            std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform_open();
            design(i, k) = (static_cast<double>(perm[i]) - u) / static_cast<double>(n);
        }
    }
    return design;
}

inline constexpr std::array<unsigned, 20> halton_primes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

/// Radical inverse of index in the given base: digits mirrored across the
/// radix point.
inline double radical_inverse(std::uint64_t index, unsigned base) {
    const double inv_base = 1.0 / static_cast<double>(base);
    double frac = inv_base;
    double result = 0.0;
    while (index > 0) {
        result += static_cast<double>(index % base) * frac;
        index /= base;
        frac *= inv_base;
    }
    return result;
}

/// Halton sequence: point i has coordinate k equal to the radical inverse
/// of (start_index + i) in the k-th prime base. start_index defaults to 1,
/// skipping the all-zero point at index 0.
inline Design gen_halton(std::size_t n, std::size_t d, std::uint64_t start_index = 1) {
    if (d > halton_primes.size())
        throw std::invalid_argument("gen_halton: d must be <= " +
                                    std::to_string(halton_primes.size()));
    Design design(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            design(i, k) = radical_inverse(start_index + i, halton_primes[k]);
    return design;
}

/// Hammersley set: first coordinate of point i is i/n (points indexed
/// 1..n), the remaining d-1 coordinates follow Halton in the first d-1
/// prime bases.
inline Design gen_hammersley(std::size_t n, std::size_t d) {
    if (d > halton_primes.size() + 1)
        throw std::invalid_argument("gen_hammersley: d must be <= " +
                                    std::to_string(halton_primes.size() + 1));
    Design design(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t index = i + 1;
        design(i, 0) = static_cast<double>(index) / static_cast<double>(n);
        for (std::size_t k = 1; k < d; ++k)
            design(i, k) = radical_inverse(index, halton_primes[k - 1]);
    }
    return design;
}

enum class Method { random, lhs, halton, hammersley, mcgauss, ppv, maximin };

inline constexpr std::array<Method, 7> all_methods = {
    Method::random, Method::lhs,  Method::halton, Method::hammersley,
    Method::mcgauss, Method::ppv, Method::maximin};

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::random: return "random";
        case Method::lhs: return "lhs";
        case Method::halton: return "halton";
        case Method::hammersley: return "hammersley";
        case Method::mcgauss: return "mcgauss";
        case Method::ppv: return "ppv";
        case Method::maximin: return "maximin";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
    for (Method m : all_methods)
        if (method_name(m) == name) return m;
    return std::nullopt;
}

inline bool is_optimized(Method m) {
    return m == Method::mcgauss || m == Method::ppv || m == Method::maximin;
}

inline ObjectiveKind objective_for(Method m) {
    switch (m) {
        case Method::mcgauss: return ObjectiveKind::entropy_mc_gauss;
        case Method::ppv: return ObjectiveKind::entropy_nn;
        case Method::maximin: return ObjectiveKind::mindist;
        default: throw std::invalid_argument("objective_for: not an optimized method");
    }
}

/// Optimizer-backed generators: multi-start exchange from random
/// initializations under the matching objective.
inline MultiStartResult gen_optimized(Method m, std::size_t n, std::size_t d,
                                      const OptimizerConfig& config) {
    return multi_start(objective_for(m), n, d, config);
}

struct GeneratorSpec {
    Method method = Method::random;
    std::size_t n = 0;  // 0 means the standard size 10*d
    std::size_t d = 1;
    std::uint64_t seed = 0;
    OptimizerConfig opt;  // optimized methods; zero limits mean 1000d/100d

    std::size_t resolved_n() const { return n == 0 ? 10 * d : n; }

    OptimizerConfig resolved_opt() const {
        OptimizerConfig cfg = opt;
        if (cfg.max_proposals == 0) cfg.max_proposals = 1000 * d;
        if (cfg.max_consecutive_rejects == 0) cfg.max_consecutive_rejects = 100 * d;
        if (cfg.restarts == 0) cfg.restarts = 5;
        cfg.seed = seed;
        return cfg;
    }
};

struct GeneratedDesign {
    Design design;
    std::optional<double> objective;  // optimized methods only
    std::optional<Trace> trace;       // best restart's trace
};

/// Single entry point used by the CLI and the benchmark harness.
inline GeneratedDesign generate(const GeneratorSpec& spec) {
    const std::size_t n = spec.resolved_n();
    if (n < 2) throw std::invalid_argument("generate: n must be >= 2");
    switch (spec.method) {
        case Method::random: {
            SeededRng rng(spec.seed, 0);
            return {gen_random(n, spec.d, rng), std::nullopt, std::nullopt};
        }
        case Method::lhs: {
            SeededRng rng(spec.seed, 0);
            return {gen_lhs(n, spec.d, rng), std::nullopt, std::nullopt};
        }
        case Method::halton: return {gen_halton(n, spec.d), std::nullopt, std::nullopt};
        case Method::hammersley: return {gen_hammersley(n, spec.d), std::nullopt, std::nullopt};
        case Method::mcgauss:
        case Method::ppv:
        case Method::maximin: {
            auto result = gen_optimized(spec.method, n, spec.d, spec.resolved_opt());
            Trace best_trace = result.traces[result.best_restart];
            return {std::move(result.best), result.best_objective, std::move(best_trace)};
        }
    }
    throw std::invalid_argument("generate: unknown method");
}

}  // namespace kld
